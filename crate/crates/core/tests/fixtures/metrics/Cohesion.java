class Cohesion {
    private int f;
    private int g;

    void m1() {
        f = 1;
    }

    void m2() {
        g = f + 1;
    }

    void m3() {
        System.out.println("none");
    }
}
