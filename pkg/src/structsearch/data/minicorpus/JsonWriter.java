package org.minicorpus.json;

import java.util.Collection;
import java.util.Iterator;
import java.util.Map;

public class JsonWriter {

    private final StringBuilder out = new StringBuilder();
    private final boolean pretty;
    private int depth;

    public JsonWriter(boolean pretty) {
        this.pretty = pretty;
        this.depth = 0;
    }

    public String write(Object value) {
        out.setLength(0);
        depth = 0;
        writeValue(value);
        return out.toString();
    }

    private void writeValue(Object value) {
        if (value == null) {
            out.append("null");
        } else if (value instanceof String) {
            writeString((String) value);
        } else if (value instanceof Number || value instanceof Boolean) {
            out.append(value.toString());
        } else if (value instanceof Map) {
            writeMap((Map<?, ?>) value);
        } else if (value instanceof Collection) {
            writeCollection((Collection<?>) value);
        } else if (value instanceof Object[]) {
            writeArray((Object[]) value);
        } else {
            writeString(value.toString());
        }
    }

    private void writeString(String s) {
        out.append('"');
        for (int i = 0; i < s.length(); i++) {
            char c = s.charAt(i);
            switch (c) {
                case '"':
                    out.append("\\\"");
                    break;
                case '\\':
                    out.append("\\\\");
                    break;
                case '\n':
                    out.append("\\n");
                    break;
                case '\t':
                    out.append("\\t");
                    break;
                default:
                    if (c < 0x20) {
                        out.append(String.format("\\u%04x", (int) c));
                    } else {
                        out.append(c);
                    }
            }
        }
        out.append('"');
    }

    private void writeMap(Map<?, ?> map) {
        out.append('{');
        depth++;
        Iterator<? extends Map.Entry<?, ?>> it = map.entrySet().iterator();
        boolean first = true;
        while (it.hasNext()) {
            Map.Entry<?, ?> entry = it.next();
            if (!first) {
                out.append(',');
            }
            newline();
            writeString(String.valueOf(entry.getKey()));
            out.append(pretty ? ": " : ":");
            writeValue(entry.getValue());
            first = false;
        }
        depth--;
        if (!map.isEmpty()) {
            newline();
        }
        out.append('}');
    }

    private void writeCollection(Collection<?> items) {
        out.append('[');
        depth++;
        int index = 0;
        for (Object item : items) {
            if (index > 0) {
                out.append(',');
            }
            newline();
            writeValue(item);
            index++;
        }
        depth--;
        if (index > 0) {
            newline();
        }
        out.append(']');
    }

    private void writeArray(Object[] items) {
        out.append('[');
        for (int i = 0; i < items.length; i++) {
            if (i > 0) {
                out.append(',');
            }
            writeValue(items[i]);
        }
        out.append(']');
    }

    private void newline() {
        if (!pretty) {
            return;
        }
        out.append('\n');
        for (int i = 0; i < depth; i++) {
            out.append("  ");
        }
    }

    public static String quote(String s) {
        return new JsonWriter(false).write(s);
    }

    public static int nesting(Object value) {
        if (value instanceof Map) {
            int best = 0;
            for (Object child : ((Map<?, ?>) value).values()) {
                best = Math.max(best, nesting(child));
            }
            return best + 1;
        }
        if (value instanceof Collection) {
            int best = 0;
            for (Object child : (Collection<?>) value) {
                best = Math.max(best, nesting(child));
            }
            return best + 1;
        }
        return 0;
    }
}
