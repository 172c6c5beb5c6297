package com.example.app;

import java.util.Properties;

public class Config {
    private final Properties props = new Properties();

    public String get(String key) {
        return props.getProperty(key);
    }
}
