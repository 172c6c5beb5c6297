package net.theta.dump;

import java.io.PrintStream;
import org.acme.io.Record;

public class Dumper {
    public void dump(Record item, PrintStream out) {
        out.println(item.field("payload"));
    }
}
