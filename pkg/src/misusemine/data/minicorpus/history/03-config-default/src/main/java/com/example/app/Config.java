package com.example.app;

import java.util.Properties;

public class Config {
    private final Properties props = new Properties();

    public String get(String key) {
        return props.getProperty(key);
    }

    public String getOrDefault(String key, String fallback) {
        String value = props.getProperty(key);
        return value == null ? fallback : value;
    }
}
