package org.minicorpus.math;

public final class MatrixMath {

    private MatrixMath() {
    }

    public static double[][] identity(int n) {
        double[][] result = new double[n][n];
        for (int i = 0; i < n; i++) {
            result[i][i] = 1.0;
        }
        return result;
    }

    public static double[][] multiply(double[][] a, double[][] b) {
        int rows = a.length;
        int cols = b[0].length;
        int inner = b.length;
        if (a[0].length != inner) {
            throw new IllegalArgumentException("shape mismatch");
        }
        double[][] c = new double[rows][cols];
        for (int i = 0; i < rows; i++) {
            for (int j = 0; j < cols; j++) {
                double sum = 0;
                for (int k = 0; k < inner; k++) {
                    sum += a[i][k] * b[k][j];
                }
                c[i][j] = sum;
            }
        }
        return c;
    }

    public static double[][] transpose(double[][] m) {
        double[][] t = new double[m[0].length][m.length];
        for (int i = 0; i < m.length; i++) {
            for (int j = 0; j < m[0].length; j++) {
                t[j][i] = m[i][j];
            }
        }
        return t;
    }

    public static double trace(double[][] m) {
        double total = 0;
        for (int i = 0; i < m.length; i++) {
            total += m[i][i];
        }
        return total;
    }

    public static double determinant(double[][] m) {
        int n = m.length;
        if (n == 1) {
            return m[0][0];
        }
        if (n == 2) {
            return m[0][0] * m[1][1] - m[0][1] * m[1][0];
        }
        double det = 0;
        for (int col = 0; col < n; col++) {
            double[][] minor = minor(m, 0, col);
            double sign = col % 2 == 0 ? 1 : -1;
            det += sign * m[0][col] * determinant(minor);
        }
        return det;
    }

    private static double[][] minor(double[][] m, int row, int col) {
        int n = m.length;
        double[][] result = new double[n - 1][n - 1];
        int r = 0;
        for (int i = 0; i < n; i++) {
            if (i == row) {
                continue;
            }
            int c = 0;
            for (int j = 0; j < n; j++) {
                if (j == col) {
                    continue;
                }
                result[r][c] = m[i][j];
                c++;
            }
            r++;
        }
        return result;
    }

    public static double dot(double[] a, double[] b) {
        double sum = 0;
        for (int i = 0; i < a.length; i++) {
            sum += a[i] * b[i];
        }
        return sum;
    }

    public static double norm(double[] v) {
        return Math.sqrt(dot(v, v));
    }

    public static long gcd(long a, long b) {
        while (b != 0) {
            long t = b;
            b = a % b;
            a = t;
        }
        return Math.abs(a);
    }

    public static long power(long base, int exponent) {
        long result = 1;
        while (exponent > 0) {
            if ((exponent & 1) == 1) {
                result *= base;
            }
            base *= base;
            exponent >>= 1;
        }
        return result;
    }

    public static boolean isPrime(int n) {
        if (n < 2) {
            return false;
        }
        for (int d = 2; d * d <= n; d++) {
            if (n % d == 0) {
                return false;
            }
        }
        return true;
    }

    public static int[] sieve(int limit) {
        boolean[] composite = new boolean[limit + 1];
        int count = 0;
        for (int i = 2; i <= limit; i++) {
            if (composite[i]) {
                continue;
            }
            count++;
            for (int j = i * 2; j <= limit; j += i) {
                composite[j] = true;
            }
        }
        int[] primes = new int[count];
        int idx = 0;
        for (int i = 2; i <= limit; i++) {
            if (!composite[i]) {
                primes[idx++] = i;
            }
        }
        return primes;
    }

    public static double mean(double[] values) {
        if (values.length == 0) {
            return Double.NaN;
        }
        double sum = 0;
        for (double v : values) {
            sum += v;
        }
        return sum / values.length;
    }

    public static double clamp(double value, double low, double high) {
        return value < low ? low : value > high ? high : value;
    }
}
