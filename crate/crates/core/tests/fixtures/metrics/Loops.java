import java.util.List;

class Loops {
    int sum(List<Integer> values) {
        int total = 0;
        for (Integer v : values) {
            total += v;
        }
        int i = 0;
        while (i < 10) {
            i++;
        }
        do {
            i--;
        } while (i > 0);
        return total;
    }
}
