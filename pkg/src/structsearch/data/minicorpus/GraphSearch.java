package org.minicorpus.graph;

import java.util.ArrayDeque;
import java.util.ArrayList;
import java.util.Arrays;
import java.util.Collections;
import java.util.Deque;
import java.util.HashMap;
import java.util.List;
import java.util.Map;
import java.util.PriorityQueue;

public class GraphSearch {

    private final int vertices;
    private final List<List<int[]>> adjacency = new ArrayList<>();

    public GraphSearch(int vertices) {
        this.vertices = vertices;
        for (int i = 0; i < vertices; i++) {
            adjacency.add(new ArrayList<>());
        }
    }

    public void addEdge(int from, int to, int weight) {
        if (from < 0 || from >= vertices || to < 0 || to >= vertices) {
            throw new IndexOutOfBoundsException("vertex out of range");
        }
        adjacency.get(from).add(new int[] {to, weight});
    }

    public List<Integer> breadthFirst(int start) {
        boolean[] seen = new boolean[vertices];
        List<Integer> order = new ArrayList<>();
        Deque<Integer> queue = new ArrayDeque<>();
        queue.add(start);
        seen[start] = true;
        while (!queue.isEmpty()) {
            int v = queue.poll();
            order.add(v);
            for (int[] edge : adjacency.get(v)) {
                if (seen[edge[0]]) {
                    continue;
                }
                seen[edge[0]] = true;
                queue.add(edge[0]);
            }
        }
        return order;
    }

    public List<Integer> depthFirst(int start) {
        boolean[] seen = new boolean[vertices];
        List<Integer> order = new ArrayList<>();
        Deque<Integer> stack = new ArrayDeque<>();
        stack.push(start);
        while (!stack.isEmpty()) {
            int v = stack.pop();
            if (seen[v]) {
                continue;
            }
            seen[v] = true;
            order.add(v);
            List<int[]> edges = adjacency.get(v);
            for (int i = edges.size() - 1; i >= 0; i--) {
                stack.push(edges.get(i)[0]);
            }
        }
        return order;
    }

    public int[] shortestDistances(int source) {
        int[] dist = new int[vertices];
        Arrays.fill(dist, Integer.MAX_VALUE);
        dist[source] = 0;
        PriorityQueue<int[]> heap = new PriorityQueue<>((a, b) -> Integer.compare(a[1], b[1]));
        heap.add(new int[] {source, 0});
        while (!heap.isEmpty()) {
            int[] top = heap.poll();
            int v = top[0];
            if (top[1] > dist[v]) {
                continue;
            }
            for (int[] edge : adjacency.get(v)) {
                int candidate = dist[v] + edge[1];
                if (candidate < dist[edge[0]]) {
                    dist[edge[0]] = candidate;
                    heap.add(new int[] {edge[0], candidate});
                }
            }
        }
        return dist;
    }

    public boolean hasPath(int from, int to) {
        for (int v : breadthFirst(from)) {
            if (v == to) {
                return true;
            }
        }
        return false;
    }

    public List<Integer> topologicalOrder() {
        int[] indegree = new int[vertices];
        for (List<int[]> edges : adjacency) {
            for (int[] edge : edges) {
                indegree[edge[0]]++;
            }
        }
        Deque<Integer> ready = new ArrayDeque<>();
        for (int v = 0; v < vertices; v++) {
            if (indegree[v] == 0) {
                ready.add(v);
            }
        }
        List<Integer> order = new ArrayList<>();
        while (!ready.isEmpty()) {
            int v = ready.poll();
            order.add(v);
            for (int[] edge : adjacency.get(v)) {
                indegree[edge[0]]--;
                if (indegree[edge[0]] == 0) {
                    ready.add(edge[0]);
                }
            }
        }
        if (order.size() != vertices) {
            throw new IllegalStateException("graph has a cycle");
        }
        return order;
    }

    public int findFirstUnreachable(int start) {
        List<Integer> reachable = breadthFirst(start);
        int found = -1;
        for (int v = 0; v < vertices; v++) {
            if (!reachable.contains(v)) {
                found = v;
                break;
            }
        }
        return found;
    }

    public Map<Integer, Integer> degreeHistogram() {
        Map<Integer, Integer> histogram = new HashMap<>();
        for (List<int[]> edges : adjacency) {
            int degree = edges.size();
            histogram.merge(degree, 1, Integer::sum);
        }
        return histogram;
    }

    public List<Integer> path(int from, int to) {
        int[] parent = new int[vertices];
        Arrays.fill(parent, -1);
        boolean[] seen = new boolean[vertices];
        Deque<Integer> queue = new ArrayDeque<>();
        queue.add(from);
        seen[from] = true;
        search:
        while (!queue.isEmpty()) {
            int v = queue.poll();
            for (int[] edge : adjacency.get(v)) {
                int w = edge[0];
                if (seen[w]) {
                    continue;
                }
                seen[w] = true;
                parent[w] = v;
                if (w == to) {
                    break search;
                }
                queue.add(w);
            }
        }
        if (!seen[to]) {
            return Collections.emptyList();
        }
        List<Integer> result = new ArrayList<>();
        for (int v = to; v != -1; v = parent[v]) {
            result.add(0, v);
        }
        return result;
    }
}
