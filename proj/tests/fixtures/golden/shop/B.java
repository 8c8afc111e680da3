package golden;

public class B extends Base implements Runnable {
    public void n(int v) {
        if (v > 0) {
            System.out.println(v);
        }
    }

    public void run() {
        int k = 0;
        k++;
    }
}
