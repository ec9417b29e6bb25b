package org.minicorpus.shop;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

public class OrderService {

    public enum Status {
        NEW, PAID, SHIPPED, DELIVERED, CANCELLED
    }

    public static class Order {
        private final int id;
        private final String customer;
        private final List<String> lines = new ArrayList<>();
        private Status status = Status.NEW;
        private long totalCents;

        public Order(int id, String customer) {
            this.id = id;
            this.customer = customer;
        }

        public int getId() {
            return id;
        }

        public String getCustomer() {
            return customer;
        }

        public Status getStatus() {
            return status;
        }

        public long getTotalCents() {
            return totalCents;
        }
    }

    private final Map<Integer, Order> orders = new HashMap<>();
    private final Inventory inventory;
    private int nextId = 1;

    public OrderService(Inventory inventory) {
        this.inventory = inventory;
    }

    public Order create(String customer) {
        Order order = new Order(nextId++, customer);
        orders.put(order.getId(), order);
        return order;
    }

    public boolean addLine(int orderId, String sku, int quantity, long unitCents) {
        Order order = orders.get(orderId);
        if (order == null || order.status != Status.NEW) {
            return false;
        }
        if (!inventory.remove(sku, quantity)) {
            return false;
        }
        order.lines.add(sku + " x" + quantity);
        order.totalCents += unitCents * quantity;
        return true;
    }

    public void advance(int orderId) {
        Order order = orders.get(orderId);
        if (order == null) {
            throw new IllegalArgumentException("no such order " + orderId);
        }
        switch (order.status) {
            case NEW:
                order.status = Status.PAID;
                break;
            case PAID:
                order.status = Status.SHIPPED;
                break;
            case SHIPPED:
                order.status = Status.DELIVERED;
                break;
            default:
                throw new IllegalStateException("cannot advance " + order.status);
        }
    }

    public boolean cancel(int orderId) {
        Order order = orders.get(orderId);
        if (order == null) {
            return false;
        }
        if (order.status == Status.SHIPPED || order.status == Status.DELIVERED) {
            return false;
        }
        order.status = Status.CANCELLED;
        return true;
    }

    public long revenue() {
        long total = 0;
        for (Order order : orders.values()) {
            if (order.status == Status.CANCELLED) {
                continue;
            }
            total += order.totalCents;
        }
        return total;
    }

    public Map<String, Integer> ordersPerCustomer() {
        Map<String, Integer> counts = new HashMap<>();
        for (Order order : orders.values()) {
            counts.merge(order.getCustomer(), 1, Integer::sum);
        }
        return counts;
    }

    public List<Order> byStatus(Status status) {
        List<Order> result = new ArrayList<>();
        for (Order order : orders.values()) {
            if (order.status == status) {
                result.add(order);
            }
        }
        return result;
    }

    public String invoice(int orderId) {
        Order order = orders.get(orderId);
        if (order == null) {
            return "";
        }
        String text = "Invoice #" + Integer.toString(order.getId()) + "\n";
        for (int i = 0; i < order.lines.size(); i++) {
            text += Integer.toString(i + 1) + ") " + order.lines.get(i) + "\n";
        }
        text += "Total: " + BankAccountFormat.cents(order.totalCents);
        return text;
    }

    static final class BankAccountFormat {
        private BankAccountFormat() {
        }

        static String cents(long value) {
            return value / 100 + "." + (value % 100 < 10 ? "0" : "") + value % 100;
        }
    }
}
