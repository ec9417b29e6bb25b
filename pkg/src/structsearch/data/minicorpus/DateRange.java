package org.minicorpus.time;

import java.util.ArrayList;
import java.util.List;

public class DateRange {

    public enum Month {
        JANUARY(31), FEBRUARY(28), MARCH(31), APRIL(30), MAY(31), JUNE(30),
        JULY(31), AUGUST(31), SEPTEMBER(30), OCTOBER(31), NOVEMBER(30), DECEMBER(31);

        private final int days;

        Month(int days) {
            this.days = days;
        }

        public int length(boolean leapYear) {
            if (this == FEBRUARY && leapYear) {
                return days + 1;
            }
            return days;
        }
    }

    public enum Weekday {
        MONDAY, TUESDAY, WEDNESDAY, THURSDAY, FRIDAY, SATURDAY, SUNDAY;

        public boolean isWeekend() {
            return this == SATURDAY || this == SUNDAY;
        }
    }

    private final int startDay;
    private final int endDay;
    private final int year;

    public DateRange(int year, int startDay, int endDay) {
        if (startDay > endDay) {
            throw new IllegalArgumentException("start after end");
        }
        this.year = year;
        this.startDay = startDay;
        this.endDay = endDay;
    }

    public static boolean isLeapYear(int year) {
        return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    }

    public int length() {
        return endDay - startDay + 1;
    }

    public boolean contains(int day) {
        return day >= startDay && day <= endDay;
    }

    public boolean overlaps(DateRange other) {
        if (other.year != year) {
            return false;
        }
        return startDay <= other.endDay && other.startDay <= endDay;
    }

    public static Month monthOf(int dayOfYear, boolean leap) {
        int remaining = dayOfYear;
        for (Month month : Month.values()) {
            int len = month.length(leap);
            if (remaining <= len) {
                return month;
            }
            remaining -= len;
        }
        throw new IllegalArgumentException("day out of range: " + dayOfYear);
    }

    public static String quarter(Month month) {
        switch (month) {
            case JANUARY:
            case FEBRUARY:
            case MARCH:
                return "Q1";
            case APRIL:
            case MAY:
            case JUNE:
                return "Q2";
            case JULY:
            case AUGUST:
            case SEPTEMBER:
                return "Q3";
            default:
                return "Q4";
        }
    }

    public int countWeekdays(Weekday firstDay) {
        int count = 0;
        int offset = firstDay.ordinal();
        for (int day = startDay; day <= endDay; day++) {
            Weekday wd = Weekday.values()[(offset + day - 1) % 7];
            if (wd.isWeekend()) {
                continue;
            }
            count++;
        }
        return count;
    }

    public List<DateRange> splitByMonth() {
        boolean leap = isLeapYear(year);
        List<DateRange> parts = new ArrayList<>();
        int monthStart = 1;
        for (Month month : Month.values()) {
            int monthEnd = monthStart + month.length(leap) - 1;
            int from = Math.max(monthStart, startDay);
            int to = Math.min(monthEnd, endDay);
            if (from <= to) {
                parts.add(new DateRange(year, from, to));
            }
            if (monthEnd >= endDay) {
                break;
            }
            monthStart = monthEnd + 1;
        }
        return parts;
    }

    public static String label(int dayOfYear, int year) {
        boolean leap = isLeapYear(year);
        Month month = monthOf(dayOfYear, leap);
        int day = dayOfYear;
        for (Month m : Month.values()) {
            if (m == month) {
                break;
            }
            day -= m.length(leap);
        }
        String suffix;
        switch (day % 10) {
            case 1:
                suffix = day == 11 ? "th" : "st";
                break;
            case 2:
                suffix = day == 12 ? "th" : "nd";
                break;
            case 3:
                suffix = day == 13 ? "th" : "rd";
                break;
            default:
                suffix = "th";
        }
        return month.name().charAt(0) + month.name().substring(1).toLowerCase() + " " + day + suffix;
    }

    @Override
    public String toString() {
        return year + ":" + startDay + "-" + endDay;
    }
}
