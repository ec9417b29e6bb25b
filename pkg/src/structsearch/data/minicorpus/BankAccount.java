package org.minicorpus.bank;

import java.util.ArrayList;
import java.util.List;

public class BankAccount {

    public enum Kind {
        CHECKING,
        SAVINGS,
        BROKERAGE
    }

    public static class InsufficientFundsException extends Exception {
        private final long shortfall;

        public InsufficientFundsException(long shortfall) {
            super("insufficient funds, short by " + shortfall);
            this.shortfall = shortfall;
        }

        public long getShortfall() {
            return shortfall;
        }
    }

    private final String owner;
    private final Kind kind;
    private long balanceCents;
    private final List<String> history = new ArrayList<>();
    private int withdrawalsThisMonth = 0;

    public BankAccount(String owner, Kind kind) {
        this.owner = owner;
        this.kind = kind;
        this.balanceCents = 0;
    }

    public String getOwner() {
        return owner;
    }

    public long getBalanceCents() {
        return balanceCents;
    }

    public void deposit(long cents) {
        if (cents <= 0) {
            throw new IllegalArgumentException("deposit must be positive");
        }
        balanceCents += cents;
        history.add("deposit " + cents);
    }

    public void withdraw(long cents) throws InsufficientFundsException {
        if (cents > balanceCents) {
            throw new InsufficientFundsException(cents - balanceCents);
        }
        if (kind == Kind.SAVINGS && withdrawalsThisMonth >= 6) {
            throw new IllegalStateException("savings withdrawal limit reached");
        }
        balanceCents -= cents;
        withdrawalsThisMonth++;
        history.add("withdraw " + cents);
    }

    public boolean tryWithdraw(long cents) {
        try {
            withdraw(cents);
            return true;
        } catch (InsufficientFundsException e) {
            history.add("declined " + e.getShortfall());
            return false;
        } catch (IllegalStateException e) {
            history.add("blocked");
            return false;
        }
    }

    public void transferTo(BankAccount other, long cents) throws InsufficientFundsException {
        withdraw(cents);
        other.deposit(cents);
        history.add("transfer to " + other.getOwner());
    }

    public double interestRate() {
        switch (kind) {
            case CHECKING:
                return 0.001;
            case SAVINGS:
                return 0.02;
            case BROKERAGE:
                return 0.0;
            default:
                throw new IllegalStateException("unknown kind " + kind);
        }
    }

    public long projectedBalance(int months) {
        double balance = balanceCents;
        double monthly = interestRate() / 12;
        for (int m = 0; m < months; m++) {
            balance = balance * (1 + monthly);
        }
        return Math.round(balance);
    }

    public void resetMonth() {
        withdrawalsThisMonth = 0;
    }

    public List<String> recentHistory(int count) {
        List<String> recent = new ArrayList<>();
        int start = Math.max(0, history.size() - count);
        for (int i = start; i < history.size(); i++) {
            recent.add(history.get(i));
        }
        return recent;
    }

    public String statement() {
        StringBuilder sb = new StringBuilder();
        sb.append("Statement for ").append(owner).append('\n');
        int line = 1;
        for (String entry : history) {
            sb.append(Integer.toString(line)).append(". ").append(entry).append('\n');
            line++;
        }
        sb.append("Balance: ").append(formatCents(balanceCents));
        return sb.toString();
    }

    public static String formatCents(long cents) {
        long whole = cents / 100;
        long fraction = Math.abs(cents % 100);
        String sign = cents < 0 ? "-" : "";
        return sign + Math.abs(whole) + "." + (fraction < 10 ? "0" : "") + fraction;
    }

    public int countDeposits() {
        int deposits = 0;
        for (String entry : history) {
            if (entry.startsWith("deposit")) {
                deposits++;
            }
        }
        return deposits;
    }

    public long largestDeposit() {
        long largest = 0;
        for (String entry : history) {
            if (!entry.startsWith("deposit")) {
                continue;
            }
            long amount = Long.parseLong(entry.substring("deposit ".length()));
            if (amount > largest) {
                largest = amount;
            }
        }
        return largest;
    }
}
