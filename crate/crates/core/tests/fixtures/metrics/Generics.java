import java.util.Map;
import java.util.HashMap;

class Generics<K, V extends Comparable<V>> {
    private final Map<K, V> store = new HashMap<>();

    <T> T first(T a, T b) {
        return a;
    }

    V get(K key) {
        return store.get(key);
    }
}
