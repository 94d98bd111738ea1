def key_prefix(key):
    return key.split(":")[0]
