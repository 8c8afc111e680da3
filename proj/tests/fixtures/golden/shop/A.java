package golden;

public class A {
    private B b = new B();

    public int m(int x) {
        int y = x + 1;
        b.n(y);
        p();
        return y;
    }

    void p() {
    }
}
