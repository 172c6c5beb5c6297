package org.gamma.cli;

import org.acme.io.DataReader;
import org.acme.io.Record;

public class ShowCommand {
    public Record run(String target) {
        DataReader input = new DataReader(target);
        Record shown = input.next();
        input.close();
        return shown;
    }

    public String usage() {
        return "show <file>";
    }
}
