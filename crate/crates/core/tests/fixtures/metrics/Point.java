public record Point(int x, int y) {
    public Point {
        if (x < 0) {
            throw new IllegalArgumentException("x");
        }
    }

    public double norm() {
        return Math.sqrt(x * x + y * y);
    }
}
