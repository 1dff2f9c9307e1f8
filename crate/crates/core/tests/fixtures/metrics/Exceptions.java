import java.io.IOException;

class Exceptions {
    int parse(String s) throws IOException {
        try {
            return Integer.parseInt(s);
        } catch (NumberFormatException e) {
            throw new IOException("bad: " + s, e);
        } finally {
            log();
        }
    }

    void log() {
    }
}
