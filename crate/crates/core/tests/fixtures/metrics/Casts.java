class Casts {
    double ratio(Object o, int total) {
        Number n = (Number) o;
        double d = (double) total;
        return n.doubleValue() / (d + 1.0);
    }
}
