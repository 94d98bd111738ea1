package com.acme;

import java.util.List;
import com.acme.model.Item;

/** Utility class. */
public class Util {
    private int count = compute();

    public List<Item> items(String s) {
        int k = s.length();
        return null;
    }

    int compute() {
        return Item.size();
    }
}
