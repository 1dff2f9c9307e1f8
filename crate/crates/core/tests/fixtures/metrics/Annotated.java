import java.util.List;

@SuppressWarnings("unchecked")
public class Annotated {
    @Deprecated
    protected List<String> items;

    @Override
    public String toString() {
        return "Annotated" + items;
    }

    @SafeVarargs
    final void addAll(String... more) {
        for (String m : more) {
            items.add(m);
        }
    }
}
