package dev.delta.sync;

import java.util.logging.Logger;
import org.acme.io.DataReader;
import org.acme.io.Record;

public class Puller {
    private static final Logger LOG = Logger.getLogger("puller");

    public Record pull(String location) {
        LOG.fine("pulling " + location);
        DataReader source = new DataReader(location);
        Record latest = source.next();
        source.close();
        return latest;
    }

    public boolean isIdle(int pending) {
        return pending == 0;
    }
}
