class LocalClass {
    int compute() {
        class Counter {
            int n;

            void inc() {
                n++;
            }
        }
        Counter c = new Counter();
        c.inc();
        return c.n;
    }
}
