package com.example.app.legacy;

import org.acme.io.DataReader;
import org.acme.io.Record;

public class OldLoader {
    public Record read(String name) {
        DataReader r = new DataReader(name);
        Record x = r.next();
        r.close();
        return x;
    }
}
