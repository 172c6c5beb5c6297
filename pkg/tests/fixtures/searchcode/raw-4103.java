package org.gamma;

import org.acme.io.*;

class Legacy {
    void run(DataReader in) { in.next(); in.close(); }
}
