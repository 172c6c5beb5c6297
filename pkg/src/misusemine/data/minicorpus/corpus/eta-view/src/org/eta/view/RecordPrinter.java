package org.eta.view;

import org.acme.io.Record;

public class RecordPrinter {
    public void print(Record shown) {
        System.out.println(shown.field("id"));
    }
}
