class Branches {
    int count(int[] xs, int limit) {
        int n = 0;
        for (int i = 0; i < xs.length; i++) {
            if (xs[i] > limit) {
                n++;
            } else {
                n--;
            }
        }
        return n;
    }
}
