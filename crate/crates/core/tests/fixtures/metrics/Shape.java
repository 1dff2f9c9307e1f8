public interface Shape {
    double PI = 3.14159;

    double area();

    default String describe() {
        return "shape with area " + area();
    }

    static Shape unit() {
        return null;
    }
}
