class Validator {
    boolean valid(String s) {
        if (s == null || s.isEmpty()) {
            return false;
        }
        int n = s.length();
        return n > 3 && n < 10 ? !s.startsWith("_") : false;
    }
}
