package com.example.app;

public class Loader {
    private final String root;

    public Loader(String root) {
        this.root = root;
    }

    public String describe() {
        return "loader:" + root;
    }
}
