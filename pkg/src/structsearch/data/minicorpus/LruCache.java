package org.minicorpus.cache;

import java.util.HashMap;
import java.util.Map;

public class LruCache<K, V> {

    private static final class Node<K, V> {
        K key;
        V value;
        Node<K, V> prev;
        Node<K, V> next;

        Node(K key, V value) {
            this.key = key;
            this.value = value;
        }
    }

    private final int capacity;
    private final Map<K, Node<K, V>> index = new HashMap<>();
    private final Node<K, V> head = new Node<>(null, null);
    private final Node<K, V> tail = new Node<>(null, null);
    private long hits;
    private long misses;

    public LruCache(int capacity) {
        if (capacity <= 0) {
            throw new IllegalArgumentException("capacity must be positive");
        }
        this.capacity = capacity;
        head.next = tail;
        tail.prev = head;
    }

    public V get(K key) {
        Node<K, V> node = index.get(key);
        if (node == null) {
            misses++;
            return null;
        }
        hits++;
        unlink(node);
        pushFront(node);
        return node.value;
    }

    public void put(K key, V value) {
        Node<K, V> node = index.get(key);
        if (node != null) {
            node.value = value;
            unlink(node);
            pushFront(node);
            return;
        }
        if (index.size() >= capacity) {
            Node<K, V> eldest = tail.prev;
            unlink(eldest);
            index.remove(eldest.key);
        }
        node = new Node<>(key, value);
        index.put(key, node);
        pushFront(node);
    }

    public boolean remove(K key) {
        Node<K, V> node = index.remove(key);
        if (node == null) {
            return false;
        }
        unlink(node);
        return true;
    }

    private void unlink(Node<K, V> node) {
        node.prev.next = node.next;
        node.next.prev = node.prev;
        node.prev = null;
        node.next = null;
    }

    private void pushFront(Node<K, V> node) {
        node.next = head.next;
        node.prev = head;
        head.next.prev = node;
        head.next = node;
    }

    public int size() {
        return index.size();
    }

    public double hitRate() {
        long total = hits + misses;
        return total == 0 ? 0.0 : (double) hits / total;
    }

    public String describe() {
        StringBuilder sb = new StringBuilder("[");
        Node<K, V> cursor = head.next;
        boolean first = true;
        while (cursor != tail) {
            if (!first) {
                sb.append(", ");
            }
            sb.append(cursor.key).append('=').append(cursor.value);
            first = false;
            cursor = cursor.next;
        }
        return sb.append(']').toString();
    }

    public void clear() {
        index.clear();
        head.next = tail;
        tail.prev = head;
        hits = 0;
        misses = 0;
    }

    public K eldestKey() {
        if (index.isEmpty()) {
            return null;
        }
        return tail.prev.key;
    }

    public int evictWhile(java.util.function.Predicate<V> condition) {
        int evicted = 0;
        Node<K, V> cursor = tail.prev;
        while (cursor != head) {
            Node<K, V> previous = cursor.prev;
            if (!condition.test(cursor.value)) {
                break;
            }
            unlink(cursor);
            index.remove(cursor.key);
            evicted++;
            cursor = previous;
        }
        return evicted;
    }
}
