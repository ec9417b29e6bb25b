package org.minicorpus.text;

import java.util.ArrayList;
import java.util.List;
import java.util.Locale;

/**
 * Small string helpers used across the sample projects.
 */
public final class TextUtils {

    private static final String VOWELS = "aeiouAEIOU";
    private static final int DEFAULT_WIDTH = 80;

    private TextUtils() {
    }

    public static boolean isBlank(String value) {
        if (value == null) {
            return true;
        }
        for (int i = 0; i < value.length(); i++) {
            if (!Character.isWhitespace(value.charAt(i))) {
                return false;
            }
        }
        return true;
    }

    public static String repeat(String unit, int times) {
        StringBuilder sb = new StringBuilder();
        for (int i = 0; i < times; i++) {
            sb.append(unit);
        }
        return sb.toString();
    }

    public static String reverse(String value) {
        char[] chars = value.toCharArray();
        int left = 0;
        int right = chars.length - 1;
        while (left < right) {
            char tmp = chars[left];
            chars[left] = chars[right];
            chars[right] = tmp;
            left++;
            right--;
        }
        return new String(chars);
    }

    public static int countVowels(String value) {
        int count = 0;
        for (char c : value.toCharArray()) {
            if (VOWELS.indexOf(c) < 0) {
                continue;
            }
            count += 1;
        }
        return count;
    }

    public static String capitalize(String word) {
        if (isBlank(word)) {
            return word;
        }
        return word.substring(0, 1).toUpperCase(Locale.ROOT) + word.substring(1);
    }

    public static String titleCase(String sentence) {
        String[] words = sentence.split(" ");
        String result = "";
        for (int i = 0; i < words.length; i++) {
            if (i > 0) {
                result += " ";
            }
            result += capitalize(words[i]);
        }
        return result;
    }

    public static List<String> wrap(String text, int width) {
        List<String> lines = new ArrayList<>();
        if (width <= 0) {
            width = DEFAULT_WIDTH;
        }
        String[] words = text.split("\\s+");
        StringBuilder line = new StringBuilder();
        for (String word : words) {
            if (line.length() + word.length() + 1 > width && line.length() > 0) {
                lines.add(line.toString());
                line.setLength(0);
            }
            if (line.length() > 0) {
                line.append(' ');
            }
            line.append(word);
        }
        if (line.length() > 0) {
            lines.add(line.toString());
        }
        return lines;
    }

    public static String joinNumbers(int[] numbers, String separator) {
        String out = "";
        for (int i = 0; i < numbers.length; i++) {
            out += Integer.toString(numbers[i]);
            if (i + 1 < numbers.length) {
                out += separator;
            }
        }
        return out;
    }

    public static boolean isPalindrome(String value) {
        String cleaned = value.replaceAll("[^A-Za-z0-9]", "").toLowerCase(Locale.ROOT);
        return cleaned.equals(reverse(cleaned));
    }

    public static int indexOfIgnoreCase(String haystack, String needle) {
        String h = haystack.toLowerCase(Locale.ROOT);
        String n = needle.toLowerCase(Locale.ROOT);
        return h.indexOf(n);
    }

    public static String padLeft(String value, int width, char fill) {
        if (value.length() >= width) {
            return value;
        }
        return repeat(String.valueOf(fill), width - value.length()) + value;
    }

    public static String abbreviate(String value, int maxLength) {
        if (value == null || value.length() <= maxLength) {
            return value;
        }
        if (maxLength < 4) {
            throw new IllegalArgumentException("maxLength must be at least 4");
        }
        return value.substring(0, maxLength - 3) + "...";
    }

    public static int levenshtein(String a, String b) {
        int[][] dp = new int[a.length() + 1][b.length() + 1];
        for (int i = 0; i <= a.length(); i++) {
            dp[i][0] = i;
        }
        for (int j = 0; j <= b.length(); j++) {
            dp[0][j] = j;
        }
        for (int i = 1; i <= a.length(); i++) {
            for (int j = 1; j <= b.length(); j++) {
                int cost = a.charAt(i - 1) == b.charAt(j - 1) ? 0 : 1;
                dp[i][j] = Math.min(Math.min(dp[i - 1][j] + 1, dp[i][j - 1] + 1), dp[i - 1][j - 1] + cost);
            }
        }
        return dp[a.length()][b.length()];
    }

    public static String squeeze(String value) {
        StringBuilder sb = new StringBuilder();
        char previous = 0;
        for (int i = 0; i < value.length(); i++) {
            char c = value.charAt(i);
            if (c == previous) {
                continue;
            }
            sb.append(c);
            previous = c;
        }
        return sb.toString();
    }
}
