package com.example.app;

import org.acme.io.DataReader;
import org.acme.io.Record;

public class Loader {
    private final String root;

    public Loader(String root) {
        this.root = root;
    }

    public String describe() {
        return "loader:" + root + "/";
    }

    public Record load(String file) {
        DataReader in = new DataReader(file);
        Record r = in.next();
        return r;
    }
}
