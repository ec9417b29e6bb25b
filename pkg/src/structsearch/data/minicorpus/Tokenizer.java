package org.minicorpus.lang;

import java.util.ArrayList;
import java.util.List;

public class Tokenizer {

    public enum Type {
        NUMBER, IDENT, OPERATOR, LPAREN, RPAREN, STRING, END
    }

    public static final class Token {
        public final Type type;
        public final String text;
        public final int position;

        public Token(Type type, String text, int position) {
            this.type = type;
            this.text = text;
            this.position = position;
        }

        @Override
        public String toString() {
            return type + "(" + text + ")@" + position;
        }
    }

    private final String source;
    private int pos;

    public Tokenizer(String source) {
        this.source = source;
        this.pos = 0;
    }

    public List<Token> tokenize() {
        List<Token> tokens = new ArrayList<>();
        Token token;
        do {
            token = next();
            tokens.add(token);
        } while (token.type != Type.END);
        return tokens;
    }

    public Token next() {
        skipWhitespace();
        if (pos >= source.length()) {
            return new Token(Type.END, "", pos);
        }
        char c = source.charAt(pos);
        int start = pos;
        if (Character.isDigit(c)) {
            while (pos < source.length() && (Character.isDigit(source.charAt(pos)) || source.charAt(pos) == '.')) {
                pos++;
            }
            return new Token(Type.NUMBER, source.substring(start, pos), start);
        }
        if (Character.isLetter(c) || c == '_') {
            while (pos < source.length() && (Character.isLetterOrDigit(source.charAt(pos)) || source.charAt(pos) == '_')) {
                pos++;
            }
            return new Token(Type.IDENT, source.substring(start, pos), start);
        }
        if (c == '"') {
            return readString();
        }
        pos++;
        switch (c) {
            case '(':
                return new Token(Type.LPAREN, "(", start);
            case ')':
                return new Token(Type.RPAREN, ")", start);
            case '+':
            case '-':
            case '*':
            case '/':
            case '%':
            case '^':
                return new Token(Type.OPERATOR, String.valueOf(c), start);
            default:
                throw new IllegalArgumentException("unexpected character '" + c + "' at " + start);
        }
    }

    private Token readString() {
        int start = pos;
        pos++;
        StringBuilder sb = new StringBuilder();
        while (pos < source.length()) {
            char c = source.charAt(pos);
            if (c == '\\' && pos + 1 < source.length()) {
                sb.append(source.charAt(pos + 1));
                pos += 2;
                continue;
            }
            if (c == '"') {
                pos++;
                return new Token(Type.STRING, sb.toString(), start);
            }
            sb.append(c);
            pos++;
        }
        throw new IllegalArgumentException("unterminated string at " + start);
    }

    private void skipWhitespace() {
        while (pos < source.length() && Character.isWhitespace(source.charAt(pos))) {
            pos++;
        }
    }

    public static int precedence(String operator) {
        switch (operator) {
            case "+":
            case "-":
                return 1;
            case "*":
            case "/":
            case "%":
                return 2;
            case "^":
                return 3;
            default:
                return 0;
        }
    }

    public static List<Token> toPostfix(List<Token> infix) {
        List<Token> output = new ArrayList<>();
        List<Token> stack = new ArrayList<>();
        for (Token token : infix) {
            if (token.type == Type.END) {
                break;
            }
            if (token.type == Type.NUMBER || token.type == Type.IDENT) {
                output.add(token);
            } else if (token.type == Type.OPERATOR) {
                while (!stack.isEmpty()) {
                    Token top = stack.get(stack.size() - 1);
                    if (top.type != Type.OPERATOR || precedence(top.text) < precedence(token.text)) {
                        break;
                    }
                    output.add(stack.remove(stack.size() - 1));
                }
                stack.add(token);
            } else if (token.type == Type.LPAREN) {
                stack.add(token);
            } else if (token.type == Type.RPAREN) {
                while (!stack.isEmpty() && stack.get(stack.size() - 1).type != Type.LPAREN) {
                    output.add(stack.remove(stack.size() - 1));
                }
                if (stack.isEmpty()) {
                    throw new IllegalArgumentException("unbalanced parenthesis at " + token.position);
                }
                stack.remove(stack.size() - 1);
            }
        }
        while (!stack.isEmpty()) {
            output.add(stack.remove(stack.size() - 1));
        }
        return output;
    }

    public static double evaluate(List<Token> postfix) {
        double[] stack = new double[postfix.size()];
        int top = 0;
        for (Token token : postfix) {
            if (token.type == Type.NUMBER) {
                stack[top++] = Double.parseDouble(token.text);
                continue;
            }
            double right = stack[--top];
            double left = stack[--top];
            double result;
            switch (token.text) {
                case "+":
                    result = left + right;
                    break;
                case "-":
                    result = left - right;
                    break;
                case "*":
                    result = left * right;
                    break;
                case "/":
                    result = left / right;
                    break;
                case "%":
                    result = left % right;
                    break;
                default:
                    result = Math.pow(left, right);
            }
            stack[top++] = result;
        }
        return stack[0];
    }
}
