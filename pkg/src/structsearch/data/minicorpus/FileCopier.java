package org.minicorpus.io;

import java.io.BufferedReader;
import java.io.ByteArrayOutputStream;
import java.io.File;
import java.io.FileInputStream;
import java.io.FileOutputStream;
import java.io.IOException;
import java.io.InputStream;
import java.io.InputStreamReader;
import java.io.OutputStream;
import java.nio.charset.StandardCharsets;
import java.util.ArrayList;
import java.util.List;
import java.util.zip.CRC32;

public class FileCopier {

    private static final int BUFFER_SIZE = 8192;
    private long bytesCopied;

    public long copy(File source, File target) throws IOException {
        try (InputStream in = new FileInputStream(source);
             OutputStream out = new FileOutputStream(target)) {
            return copy(in, out);
        }
    }

    public long copy(InputStream in, OutputStream out) throws IOException {
        byte[] buffer = new byte[BUFFER_SIZE];
        long total = 0;
        int read;
        while ((read = in.read(buffer)) != -1) {
            out.write(buffer, 0, read);
            total += read;
        }
        bytesCopied += total;
        return total;
    }

    public byte[] readAll(InputStream in) throws IOException {
        ByteArrayOutputStream out = new ByteArrayOutputStream();
        int b = in.read();
        while (b != -1) {
            out.write(b);
            b = in.read();
        }
        return out.toByteArray();
    }

    public List<String> readLines(File file) throws IOException {
        List<String> lines = new ArrayList<>();
        try (BufferedReader reader = new BufferedReader(
                new InputStreamReader(new FileInputStream(file), StandardCharsets.UTF_8))) {
            String line;
            while ((line = reader.readLine()) != null) {
                lines.add(line);
            }
        }
        return lines;
    }

    public long checksum(File file) throws IOException {
        CRC32 crc = new CRC32();
        try (InputStream in = new FileInputStream(file)) {
            byte[] buffer = new byte[BUFFER_SIZE];
            int n;
            while ((n = in.read(buffer)) > 0) {
                crc.update(buffer, 0, n);
            }
        }
        return crc.getValue();
    }

    public boolean sameContent(File a, File b) throws IOException {
        if (a.length() != b.length()) {
            return false;
        }
        try (InputStream left = new FileInputStream(a);
             InputStream right = new FileInputStream(b)) {
            int x;
            do {
                x = left.read();
                int y = right.read();
                if (x != y) {
                    return false;
                }
            } while (x != -1);
        }
        return true;
    }

    public int copyDirectory(File sourceDir, File targetDir) throws IOException {
        if (!targetDir.exists() && !targetDir.mkdirs()) {
            throw new IOException("cannot create " + targetDir);
        }
        File[] children = sourceDir.listFiles();
        if (children == null) {
            return 0;
        }
        int copied = 0;
        for (File child : children) {
            File dest = new File(targetDir, child.getName());
            if (child.isDirectory()) {
                copied += copyDirectory(child, dest);
                continue;
            }
            copy(child, dest);
            copied++;
        }
        return copied;
    }

    public int countLines(InputStream in) throws IOException {
        int lines = 0;
        int c;
        while ((c = in.read()) != -1) {
            if (c == '\n') {
                lines++;
            }
        }
        return lines;
    }

    public void closeQuietly(InputStream in) {
        if (in == null) {
            return;
        }
        try {
            in.close();
        } catch (IOException ignored) {
            // nothing useful to do here
        }
    }

    public long getBytesCopied() {
        return bytesCopied;
    }
}
