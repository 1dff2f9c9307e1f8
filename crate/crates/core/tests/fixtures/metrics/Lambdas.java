import java.util.List;
import java.util.function.Function;

class Lambdas {
    void apply(List<String> items) {
        Function<String, Integer> len = s -> s.length();
        items.forEach(item -> {
            System.out.println(item);
        });
        Runnable r = () -> {};
    }
}
