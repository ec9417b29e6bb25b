package org.minicorpus.concurrent;

import java.util.ArrayDeque;
import java.util.ArrayList;
import java.util.Deque;
import java.util.List;

public class WorkerPool {

    private final Deque<Runnable> queue = new ArrayDeque<>();
    private final List<Thread> workers = new ArrayList<>();
    private final Object lock = new Object();
    private volatile boolean running;
    private int completed;
    private int failed;

    public WorkerPool(int size) {
        if (size < 1) {
            throw new IllegalArgumentException("pool needs at least one worker");
        }
        for (int i = 0; i < size; i++) {
            Thread worker = new Thread(this::workLoop, "worker-" + i);
            worker.setDaemon(true);
            workers.add(worker);
        }
    }

    public void start() {
        running = true;
        for (Thread worker : workers) {
            worker.start();
        }
    }

    public void submit(Runnable task) {
        synchronized (lock) {
            if (!running) {
                throw new IllegalStateException("pool is not running");
            }
            queue.addLast(task);
            lock.notifyAll();
        }
    }

    private void workLoop() {
        while (!Thread.interrupted()) {
            Runnable task;
            synchronized (lock) {
                while (queue.isEmpty() && running) {
                    try {
                        lock.wait();
                    } catch (InterruptedException e) {
                        Thread.currentThread().interrupt();
                        return;
                    }
                }
                if (!running && queue.isEmpty()) {
                    return;
                }
                task = queue.pollFirst();
            }
            try {
                task.run();
                synchronized (lock) {
                    completed++;
                }
            } catch (RuntimeException e) {
                synchronized (lock) {
                    failed++;
                }
            }
        }
    }

    public void shutdown() throws InterruptedException {
        synchronized (lock) {
            running = false;
            lock.notifyAll();
        }
        for (Thread worker : workers) {
            worker.join(1000);
        }
    }

    public void shutdownNow() {
        running = false;
        for (Thread worker : workers) {
            worker.interrupt();
        }
        synchronized (lock) {
            queue.clear();
        }
    }

    public int pending() {
        synchronized (lock) {
            return queue.size();
        }
    }

    public int getCompleted() {
        synchronized (lock) {
            return completed;
        }
    }

    public int getFailed() {
        synchronized (lock) {
            return failed;
        }
    }

    public static void sleepQuietly(long millis) {
        try {
            Thread.sleep(millis);
        } catch (InterruptedException e) {
            Thread.currentThread().interrupt();
        }
    }

    public static int spinUntil(java.util.function.BooleanSupplier condition, int maxSpins) {
        int spins = 0;
        while (!condition.getAsBoolean()) {
            if (spins >= maxSpins) {
                break;
            }
            Thread.yield();
            spins++;
        }
        return spins;
    }

    public void awaitIdle(long timeoutMillis) throws InterruptedException {
        long deadline = System.currentTimeMillis() + timeoutMillis;
        while (pending() > 0) {
            long remaining = deadline - System.currentTimeMillis();
            if (remaining <= 0) {
                throw new InterruptedException("timed out waiting for idle pool");
            }
            Thread.sleep(Math.min(remaining, 10));
        }
    }
}
