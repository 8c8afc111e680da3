package golden;

public abstract class C extends A implements Runnable, Cloneable {
    private final B helper = new B();

    public void run() {
        int i = 0;
        while (i < 3) {
            helper.n(i);
            i++;
        }
        m(2);
        String s = name();
    }

    protected abstract String name();
}
