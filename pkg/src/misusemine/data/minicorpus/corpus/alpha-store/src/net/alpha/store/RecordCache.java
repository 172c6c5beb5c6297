package net.alpha.store;

import java.util.HashMap;
import java.util.Map;
import org.acme.io.DataReader;
import org.acme.io.Record;

public class RecordCache {
    private final Map<String, Object> cache = new HashMap<>();

    public Record fetch(String path) {
        DataReader reader = new DataReader(path);
        Record rec = reader.next();
        reader.close();
        return rec;
    }

    public int size() {
        return cache.size();
    }
}
