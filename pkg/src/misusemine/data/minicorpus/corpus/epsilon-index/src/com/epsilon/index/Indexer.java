package com.epsilon.index;

import org.acme.io.DataReader;
import org.acme.io.Record;

public class Indexer {
    private int indexed;

    public Record peek(String segment) {
        DataReader seg = new DataReader(segment);
        Record top;
        try {
            top = seg.next();
        } finally {
            seg.close();
        }
        return top;
    }

    public void reset() {
        indexed = 0;
    }
}
