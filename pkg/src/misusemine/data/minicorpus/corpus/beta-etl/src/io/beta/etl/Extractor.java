package io.beta.etl;

import java.util.List;
import org.acme.io.DataReader;
import org.acme.io.Record;

public class Extractor {
    private final List<String> sources;

    public Extractor(List<String> sources) {
        this.sources = sources;
    }

    public Record first(String source) {
        DataReader dr = new DataReader(source);
        Record head;
        try {
            head = dr.next();
        } finally {
            dr.close();
        }
        return head;
    }
}
