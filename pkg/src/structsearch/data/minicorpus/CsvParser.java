package org.minicorpus.io;

import java.util.ArrayList;
import java.util.List;

public class CsvParser {

    private final char delimiter;
    private final char quote;
    private int lineNumber;

    public CsvParser(char delimiter, char quote) {
        this.delimiter = delimiter;
        this.quote = quote;
        this.lineNumber = 0;
    }

    public CsvParser() {
        this(',', '"');
    }

    public List<String> parseLine(String line) {
        lineNumber++;
        List<String> fields = new ArrayList<>();
        StringBuilder current = new StringBuilder();
        boolean inQuotes = false;
        int i = 0;
        while (i < line.length()) {
            char c = line.charAt(i);
            if (inQuotes) {
                if (c == quote) {
                    if (i + 1 < line.length() && line.charAt(i + 1) == quote) {
                        current.append(quote);
                        i++;
                    } else {
                        inQuotes = false;
                    }
                } else {
                    current.append(c);
                }
            } else if (c == quote) {
                inQuotes = true;
            } else if (c == delimiter) {
                fields.add(current.toString());
                current.setLength(0);
            } else {
                current.append(c);
            }
            i++;
        }
        if (inQuotes) {
            throw new IllegalArgumentException("unterminated quote on line " + lineNumber);
        }
        fields.add(current.toString());
        return fields;
    }

    public List<List<String>> parseAll(List<String> lines) {
        List<List<String>> rows = new ArrayList<>();
        for (String line : lines) {
            if (line.isEmpty()) {
                continue;
            }
            if (line.startsWith("#")) {
                continue;
            }
            rows.add(parseLine(line));
        }
        return rows;
    }

    public String format(List<String> fields) {
        StringBuilder sb = new StringBuilder();
        for (int i = 0; i < fields.size(); i++) {
            if (i > 0) {
                sb.append(delimiter);
            }
            sb.append(escape(fields.get(i)));
        }
        return sb.toString();
    }

    private String escape(String field) {
        boolean needsQuotes = field.indexOf(delimiter) >= 0 || field.indexOf(quote) >= 0 || field.indexOf('\n') >= 0;
        if (!needsQuotes) {
            return field;
        }
        StringBuilder sb = new StringBuilder();
        sb.append(quote);
        for (char c : field.toCharArray()) {
            if (c == quote) {
                sb.append(quote);
            }
            sb.append(c);
        }
        sb.append(quote);
        return sb.toString();
    }

    public static Object convert(String raw) {
        String trimmed = raw.trim();
        switch (trimmed.toLowerCase()) {
            case "true":
                return Boolean.TRUE;
            case "false":
                return Boolean.FALSE;
            case "":
            case "null":
                return null;
            default:
                break;
        }
        try {
            return Integer.parseInt(trimmed);
        } catch (NumberFormatException notInt) {
            try {
                return Double.parseDouble(trimmed);
            } catch (NumberFormatException notDouble) {
                return trimmed;
            }
        }
    }

    public int columnIndex(List<String> header, String name) {
        for (int i = 0; i < header.size(); i++) {
            if (header.get(i).equals(name)) {
                return i;
            }
        }
        return -1;
    }

    public double sumColumn(List<List<String>> rows, int column) {
        double total = 0;
        for (List<String> row : rows) {
            if (column >= row.size()) {
                continue;
            }
            Object value = convert(row.get(column));
            if (value instanceof Number) {
                total += ((Number) value).doubleValue();
            }
        }
        return total;
    }

    public int getLineNumber() {
        return lineNumber;
    }
}
