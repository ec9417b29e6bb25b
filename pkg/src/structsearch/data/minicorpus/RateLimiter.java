package org.minicorpus.net;

import java.util.ArrayDeque;
import java.util.Deque;
import java.util.HashMap;
import java.util.Map;

public class RateLimiter {

    public interface Clock {
        long nowMillis();
    }

    private static final class Window {
        final Deque<Long> stamps = new ArrayDeque<>();
        int rejected;
    }

    private final int limit;
    private final long windowMillis;
    private final Clock clock;
    private final Map<String, Window> windows = new HashMap<>();

    public RateLimiter(int limit, long windowMillis, Clock clock) {
        this.limit = limit;
        this.windowMillis = windowMillis;
        this.clock = clock;
    }

    public RateLimiter(int limit, long windowMillis) {
        this(limit, windowMillis, System::currentTimeMillis);
    }

    public boolean tryAcquire(String key) {
        long now = clock.nowMillis();
        Window window = windows.computeIfAbsent(key, k -> new Window());
        while (!window.stamps.isEmpty() && now - window.stamps.peekFirst() >= windowMillis) {
            window.stamps.pollFirst();
        }
        if (window.stamps.size() >= limit) {
            window.rejected++;
            return false;
        }
        window.stamps.addLast(now);
        return true;
    }

    public int remaining(String key) {
        Window window = windows.get(key);
        if (window == null) {
            return limit;
        }
        return Math.max(0, limit - window.stamps.size());
    }

    public int rejectedCount(String key) {
        Window window = windows.get(key);
        return window == null ? 0 : window.rejected;
    }

    public long retryAfter(String key) {
        Window window = windows.get(key);
        if (window == null || window.stamps.size() < limit) {
            return 0;
        }
        long oldest = window.stamps.peekFirst();
        return Math.max(0, oldest + windowMillis - clock.nowMillis());
    }

    public int purgeIdle() {
        int purged = 0;
        long now = clock.nowMillis();
        for (String key : new java.util.ArrayList<>(windows.keySet())) {
            Window window = windows.get(key);
            Long last = window.stamps.peekLast();
            if (last != null && now - last < windowMillis) {
                continue;
            }
            windows.remove(key);
            purged++;
        }
        return purged;
    }

    public boolean acquireBlocking(String key, long timeoutMillis) throws InterruptedException {
        long deadline = clock.nowMillis() + timeoutMillis;
        while (!tryAcquire(key)) {
            if (Thread.interrupted()) {
                throw new InterruptedException();
            }
            if (clock.nowMillis() >= deadline) {
                return false;
            }
            Thread.sleep(Math.max(1, retryAfter(key)));
        }
        return true;
    }

    public String status() {
        StringBuilder sb = new StringBuilder();
        for (Map.Entry<String, Window> entry : windows.entrySet()) {
            sb.append(entry.getKey()).append(": ");
            sb.append(entry.getValue().stamps.size()).append('/').append(limit);
            if (entry.getValue().rejected > 0) {
                sb.append(" (rejected ").append(entry.getValue().rejected).append(')');
            }
            sb.append('\n');
        }
        return sb.toString();
    }
}
