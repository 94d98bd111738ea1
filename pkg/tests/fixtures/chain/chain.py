def c():
    return 1


def b():
    return c()


def a():
    return b()
