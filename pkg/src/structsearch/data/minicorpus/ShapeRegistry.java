package org.minicorpus.geometry;

import java.util.ArrayList;
import java.util.List;

public class ShapeRegistry {

    public interface Shape {
        double area();

        double perimeter();

        default String describe() {
            return getClass().getSimpleName() + " area=" + area();
        }
    }

    public static final class Circle implements Shape {
        private final double radius;

        public Circle(double radius) {
            this.radius = radius;
        }

        @Override
        public double area() {
            return Math.PI * radius * radius;
        }

        @Override
        public double perimeter() {
            return 2 * Math.PI * radius;
        }
    }

    public static final class Rectangle implements Shape {
        private final double width;
        private final double height;

        public Rectangle(double width, double height) {
            this.width = width;
            this.height = height;
        }

        @Override
        public double area() {
            return width * height;
        }

        @Override
        public double perimeter() {
            return 2 * (width + height);
        }

        public boolean isSquare() {
            return width == height;
        }
    }

    public static final class Triangle implements Shape {
        private final double a;
        private final double b;
        private final double c;

        public Triangle(double a, double b, double c) {
            if (a + b <= c || a + c <= b || b + c <= a) {
                throw new IllegalArgumentException("not a triangle");
            }
            this.a = a;
            this.b = b;
            this.c = c;
        }

        @Override
        public double area() {
            double s = perimeter() / 2;
            return Math.sqrt(s * (s - a) * (s - b) * (s - c));
        }

        @Override
        public double perimeter() {
            return a + b + c;
        }
    }

    private final List<Shape> shapes = new ArrayList<>();

    public void register(Shape shape) {
        shapes.add(shape);
    }

    public double totalArea() {
        double total = 0;
        for (Shape shape : shapes) {
            total += shape.area();
        }
        return total;
    }

    public Shape largest() {
        Shape best = null;
        for (Shape shape : shapes) {
            if (best == null || shape.area() > best.area()) {
                best = shape;
            }
        }
        return best;
    }

    public int countSquares() {
        int squares = 0;
        for (Shape shape : shapes) {
            if (!(shape instanceof Rectangle)) {
                continue;
            }
            if (((Rectangle) shape).isSquare()) {
                squares++;
            }
        }
        return squares;
    }

    public List<Shape> withAreaAbove(double threshold) {
        List<Shape> result = new ArrayList<>();
        for (Shape shape : shapes) {
            if (shape.area() > threshold) {
                result.add(shape);
            }
        }
        return result;
    }

    public static Shape parse(String spec) {
        String[] parts = spec.trim().split("\\s+");
        switch (parts[0]) {
            case "circle":
                return new Circle(Double.parseDouble(parts[1]));
            case "rect":
                return new Rectangle(Double.parseDouble(parts[1]), Double.parseDouble(parts[2]));
            case "triangle":
                return new Triangle(Double.parseDouble(parts[1]), Double.parseDouble(parts[2]), Double.parseDouble(parts[3]));
            default:
                throw new IllegalArgumentException("unknown shape " + parts[0]);
        }
    }

    public String catalog() {
        String text = "";
        int index = 0;
        for (Shape shape : shapes) {
            index++;
            text += Integer.toString(index) + ": " + shape.describe() + "\n";
        }
        return text;
    }
}
