package org.minicorpus.config;

import java.io.BufferedReader;
import java.io.IOException;
import java.io.Reader;
import java.util.ArrayList;
import java.util.LinkedHashMap;
import java.util.List;
import java.util.Map;

public class ConfigLoader {

    public static class ConfigException extends RuntimeException {
        public ConfigException(String message) {
            super(message);
        }
    }

    private final Map<String, String> values = new LinkedHashMap<>();
    private final List<String> warnings = new ArrayList<>();
    private String section = "";

    public void load(Reader source) throws IOException {
        BufferedReader reader = new BufferedReader(source);
        String line;
        int number = 0;
        while ((line = reader.readLine()) != null) {
            number++;
            String trimmed = line.trim();
            if (trimmed.isEmpty() || trimmed.startsWith(";") || trimmed.startsWith("#")) {
                continue;
            }
            if (trimmed.startsWith("[")) {
                if (!trimmed.endsWith("]")) {
                    throw new ConfigException("bad section header on line " + number);
                }
                section = trimmed.substring(1, trimmed.length() - 1).trim();
                continue;
            }
            int eq = trimmed.indexOf('=');
            if (eq < 0) {
                warnings.add("line " + number + " ignored");
                continue;
            }
            String key = trimmed.substring(0, eq).trim();
            String value = trimmed.substring(eq + 1).trim();
            values.put(section.isEmpty() ? key : section + "." + key, unquote(value));
        }
    }

    private static String unquote(String value) {
        if (value.length() >= 2 && value.startsWith("\"") && value.endsWith("\"")) {
            return value.substring(1, value.length() - 1);
        }
        return value;
    }

    public String get(String key, String fallback) {
        String value = values.get(key);
        return value != null ? value : fallback;
    }

    public int getInt(String key, int fallback) {
        String value = values.get(key);
        if (value == null) {
            return fallback;
        }
        try {
            return Integer.parseInt(value);
        } catch (NumberFormatException e) {
            warnings.add(key + " is not an integer");
            return fallback;
        }
    }

    public boolean getBoolean(String key, boolean fallback) {
        String value = values.get(key);
        if (value == null) {
            return fallback;
        }
        switch (value.toLowerCase()) {
            case "true":
            case "yes":
            case "on":
                return true;
            case "false":
            case "no":
            case "off":
                return false;
            default:
                warnings.add(key + " is not a boolean");
                return fallback;
        }
    }

    public List<String> getList(String key) {
        List<String> items = new ArrayList<>();
        String value = values.get(key);
        if (value == null) {
            return items;
        }
        for (String part : value.split(",")) {
            String item = part.trim();
            if (item.isEmpty()) {
                continue;
            }
            items.add(item);
        }
        return items;
    }

    public Map<String, String> section(String name) {
        Map<String, String> result = new LinkedHashMap<>();
        String prefix = name + ".";
        for (Map.Entry<String, String> entry : values.entrySet()) {
            if (entry.getKey().startsWith(prefix)) {
                result.put(entry.getKey().substring(prefix.length()), entry.getValue());
            }
        }
        return result;
    }

    public String require(String key) {
        String value = values.get(key);
        if (value == null) {
            throw new ConfigException("missing required key " + key);
        }
        return value;
    }

    public int size() {
        return values.size();
    }

    public List<String> getWarnings() {
        return warnings;
    }

    public String dump() {
        StringBuilder sb = new StringBuilder();
        String current = null;
        for (Map.Entry<String, String> entry : values.entrySet()) {
            String key = entry.getKey();
            int dot = key.lastIndexOf('.');
            String sec = dot < 0 ? "" : key.substring(0, dot);
            if (!sec.equals(current)) {
                if (!sec.isEmpty()) {
                    sb.append('[').append(sec).append("]\n");
                }
                current = sec;
            }
            sb.append(key.substring(dot + 1)).append(" = ").append(entry.getValue()).append('\n');
        }
        return sb.toString();
    }
}
