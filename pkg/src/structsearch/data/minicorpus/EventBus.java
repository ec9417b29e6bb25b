package org.minicorpus.events;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

public class EventBus {

    public interface Listener {
        void onEvent(String topic, Object payload);
    }

    public interface Filter {
        boolean accept(String topic);
    }

    private final Map<String, List<Listener>> listeners = new HashMap<>();
    private final List<String> deadLetters = new ArrayList<>();
    private int delivered;
    private boolean paused;

    public void subscribe(String topic, Listener listener) {
        List<Listener> list = listeners.get(topic);
        if (list == null) {
            list = new ArrayList<>();
            listeners.put(topic, list);
        }
        list.add(listener);
    }

    public boolean unsubscribe(String topic, Listener listener) {
        List<Listener> list = listeners.get(topic);
        if (list == null) {
            return false;
        }
        boolean removed = list.remove(listener);
        if (list.isEmpty()) {
            listeners.remove(topic);
        }
        return removed;
    }

    public int publish(String topic, Object payload) {
        if (paused) {
            deadLetters.add(topic);
            return 0;
        }
        List<Listener> list = listeners.get(topic);
        if (list == null || list.isEmpty()) {
            deadLetters.add(topic);
            return 0;
        }
        int count = 0;
        for (Listener listener : new ArrayList<>(list)) {
            try {
                listener.onEvent(topic, payload);
                count++;
            } catch (RuntimeException e) {
                deadLetters.add(topic + ": " + e.getMessage());
            }
        }
        delivered += count;
        return count;
    }

    public int broadcast(Filter filter, Object payload) {
        int total = 0;
        for (String topic : new ArrayList<>(listeners.keySet())) {
            if (!filter.accept(topic)) {
                continue;
            }
            total += publish(topic, payload);
        }
        return total;
    }

    public Listener logging(final List<String> sink) {
        return new Listener() {
            @Override
            public void onEvent(String topic, Object payload) {
                sink.add(topic + " -> " + payload);
            }
        };
    }

    public Filter prefix(final String prefix) {
        return topic -> topic.startsWith(prefix);
    }

    public void pause() {
        paused = true;
    }

    public int resume() {
        paused = false;
        int replayed = 0;
        List<String> pending = new ArrayList<>(deadLetters);
        deadLetters.clear();
        for (String topic : pending) {
            if (topic.contains(": ")) {
                continue;
            }
            replayed += publish(topic, null);
        }
        return replayed;
    }

    public int getDelivered() {
        return delivered;
    }

    public List<String> getDeadLetters() {
        return new ArrayList<>(deadLetters);
    }

    public int topicCount() {
        return listeners.size();
    }

    public int listenerCount() {
        int total = 0;
        for (List<Listener> list : listeners.values()) {
            total += list.size();
        }
        return total;
    }
}
