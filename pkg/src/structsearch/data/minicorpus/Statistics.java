package org.minicorpus.math;

import java.util.Arrays;
import java.util.HashMap;
import java.util.Map;

public class Statistics {

    private final double[] data;

    public Statistics(double[] data) {
        this.data = Arrays.copyOf(data, data.length);
    }

    public double sum() {
        double total = 0;
        for (int i = 0; i < data.length; i++) {
            total += data[i];
        }
        return total;
    }

    public double mean() {
        return data.length == 0 ? 0 : sum() / data.length;
    }

    public double variance() {
        if (data.length < 2) {
            return 0;
        }
        double m = mean();
        double acc = 0;
        for (double x : data) {
            acc += (x - m) * (x - m);
        }
        return acc / (data.length - 1);
    }

    public double stddev() {
        return Math.sqrt(variance());
    }

    public double median() {
        double[] sorted = Arrays.copyOf(data, data.length);
        Arrays.sort(sorted);
        int mid = sorted.length / 2;
        if (sorted.length % 2 == 0) {
            return (sorted[mid - 1] + sorted[mid]) / 2;
        }
        return sorted[mid];
    }

    public double max() {
        double best = Double.NEGATIVE_INFINITY;
        for (double x : data) {
            if (x > best) {
                best = x;
            }
        }
        return best;
    }

    public double min() {
        double best = Double.POSITIVE_INFINITY;
        for (double x : data) {
            if (x < best) {
                best = x;
            }
        }
        return best;
    }

    public int[] histogram(int buckets) {
        int[] counts = new int[buckets];
        double low = min();
        double width = (max() - low) / buckets;
        for (double x : data) {
            int bucket = width == 0 ? 0 : (int) ((x - low) / width);
            if (bucket >= buckets) {
                bucket = buckets - 1;
            }
            counts[bucket]++;
        }
        return counts;
    }

    public String histogramLabel(int buckets) {
        int[] counts = histogram(buckets);
        String label = "";
        for (int i = 0; i < counts.length; i++) {
            label += Integer.toString(counts[i]);
            label += i + 1 < counts.length ? "," : "";
        }
        return label;
    }

    public Map<Long, Integer> modeCounts() {
        Map<Long, Integer> counts = new HashMap<>();
        for (double x : data) {
            long key = Math.round(x);
            Integer current = counts.get(key);
            counts.put(key, current == null ? 1 : current + 1);
        }
        return counts;
    }

    public double percentile(double p) {
        if (p < 0 || p > 100) {
            throw new IllegalArgumentException("percentile out of range");
        }
        double[] sorted = Arrays.copyOf(data, data.length);
        Arrays.sort(sorted);
        double rank = p / 100 * (sorted.length - 1);
        int lower = (int) Math.floor(rank);
        int upper = (int) Math.ceil(rank);
        double fraction = rank - lower;
        return sorted[lower] + fraction * (sorted[upper] - sorted[lower]);
    }

    public double correlation(double[] other) {
        if (other.length != data.length) {
            throw new IllegalArgumentException("length mismatch");
        }
        double mx = mean();
        double my = new Statistics(other).mean();
        double num = 0;
        double dx = 0;
        double dy = 0;
        for (int i = 0; i < data.length; i++) {
            double a = data[i] - mx;
            double b = other[i] - my;
            num += a * b;
            dx += a * a;
            dy += b * b;
        }
        return num / Math.sqrt(dx * dy);
    }

    public int countAbove(double threshold) {
        int count = 0;
        int i = 0;
        while (i < data.length) {
            if (data[i] > threshold) {
                count++;
            }
            i++;
        }
        return count;
    }

    public String summary() {
        String text = "n=" + Integer.toString(data.length);
        text += " mean=" + String.format("%.3f", mean());
        text += " sd=" + String.format("%.3f", stddev());
        return text;
    }
}
