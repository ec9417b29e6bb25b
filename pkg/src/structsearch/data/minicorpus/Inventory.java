package org.minicorpus.shop;

import java.util.ArrayList;
import java.util.Collections;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

public class Inventory {

    public static class Item {
        private final String sku;
        private final String name;
        private int quantity;
        private double price;

        public Item(String sku, String name, int quantity, double price) {
            this.sku = sku;
            this.name = name;
            this.quantity = quantity;
            this.price = price;
        }

        public String getSku() {
            return sku;
        }

        public String getName() {
            return name;
        }

        public int getQuantity() {
            return quantity;
        }

        public void setQuantity(int quantity) {
            this.quantity = quantity;
        }

        public double getPrice() {
            return price;
        }

        public double total() {
            return quantity * price;
        }
    }

    private final Map<String, Item> items = new HashMap<>();
    private int lowStockThreshold = 5;

    public void add(Item item) {
        Item existing = items.get(item.getSku());
        if (existing != null) {
            existing.setQuantity(existing.getQuantity() + item.getQuantity());
        } else {
            items.put(item.getSku(), item);
        }
    }

    public boolean remove(String sku, int amount) {
        Item item = items.get(sku);
        if (item == null) {
            return false;
        }
        if (item.getQuantity() < amount) {
            return false;
        }
        item.setQuantity(item.getQuantity() - amount);
        if (item.getQuantity() == 0) {
            items.remove(sku);
        }
        return true;
    }

    public double totalValue() {
        double sum = 0.0;
        for (Item item : items.values()) {
            sum += item.total();
        }
        return sum;
    }

    public List<Item> lowStock() {
        List<Item> result = new ArrayList<>();
        for (Item item : items.values()) {
            if (item.getQuantity() >= lowStockThreshold) {
                continue;
            }
            result.add(item);
        }
        Collections.sort(result, (a, b) -> a.getSku().compareTo(b.getSku()));
        return result;
    }

    public Item mostValuable() {
        Item best = null;
        for (Item item : items.values()) {
            if (best == null || item.total() > best.total()) {
                best = item;
            }
        }
        return best;
    }

    public int countUnits() {
        int units = 0;
        for (Item item : items.values()) {
            units += item.getQuantity();
        }
        return units;
    }

    public void setLowStockThreshold(int threshold) {
        if (threshold < 0) {
            throw new IllegalArgumentException("threshold must be non-negative");
        }
        this.lowStockThreshold = threshold;
    }

    public Item findByName(String name) {
        for (Item item : items.values()) {
            if (item.getName().equalsIgnoreCase(name)) {
                return item;
            }
        }
        return null;
    }

    public String report() {
        StringBuilder sb = new StringBuilder();
        List<String> skus = new ArrayList<>(items.keySet());
        Collections.sort(skus);
        for (String sku : skus) {
            Item item = items.get(sku);
            sb.append(sku).append(": ").append(item.getName());
            sb.append(" x").append(item.getQuantity());
            sb.append('\n');
        }
        return sb.toString();
    }

    public void applyDiscount(double percent) {
        if (percent <= 0 || percent >= 100) {
            return;
        }
        for (Item item : items.values()) {
            item.price = item.price * (1 - percent / 100);
        }
    }

    public int restock(int target) {
        int ordered = 0;
        for (Item item : items.values()) {
            int missing = target - item.getQuantity();
            if (missing <= 0) {
                continue;
            }
            item.setQuantity(target);
            ordered += missing;
        }
        return ordered;
    }

    public Map<String, Integer> quantitiesByInitial() {
        Map<String, Integer> counts = new HashMap<>();
        for (Item item : items.values()) {
            String key = item.getName().substring(0, 1);
            counts.put(key, counts.getOrDefault(key, 0) + item.getQuantity());
        }
        return counts;
    }
}
