package org.alpha;

import org.acme.io.DataReader;

class Fetcher {
    Object get(DataReader in) { return in.next(); }
}
