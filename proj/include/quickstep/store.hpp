#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "quickstep/common.hpp"

namespace quickstep {

/// Thrown by the crash-injection hook after a partial write.
class SimulatedCrash : public Error {
public:
    using Error::Error;
};

class StorageError : public Error {
public:
    using Error::Error;
};

struct WriteOptions {
    bool durable = false;  // fsync file (and directory on rename)
    /// Test hook: write only this many bytes of the next write, then throw SimulatedCrash.
    std::optional<std::size_t> crash_after_bytes;
};

std::string read_file(const std::filesystem::path& path);

/// Write to `<path>.new`, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content, const WriteOptions& options = {});

/// Append-only file of newline-terminated records. Opening drops an
/// unterminated tail left by an interrupted append; an acked record is never
/// rewritten.
class LineLog {
public:
    using Lines = std::vector<std::string>;

    explicit LineLog(std::filesystem::path path, bool durable = false);
    LineLog(const LineLog&) = delete;
    LineLog& operator=(const LineLog&) = delete;

    const std::filesystem::path& path() const { return path_; }

    /// Bytes discarded from a torn tail when the file was opened.
    std::size_t recovered_bytes() const { return recovered_bytes_; }

    /// Appends all lines with one write; returns once they are on disk (the ack).
    void append(const Lines& lines);
    void append(const std::string& line) { append(Lines{line}); }

    /// Point-in-time view; later appends are invisible to it.
    std::shared_ptr<const Lines> snapshot() const;
    std::size_t size() const;

    void crash_after(std::optional<std::size_t> bytes);

private:
    std::filesystem::path path_;
    bool durable_;
    std::size_t recovered_bytes_ = 0;
    std::optional<std::size_t> crash_after_;
    bool broken_ = false;
    mutable std::mutex mutex_;
    std::shared_ptr<Lines> lines_;
};

/// Typed view over a LineLog. Codec supplies `static std::string format(const R&)`
/// and `static R parse(std::string_view)`; every record is checked to survive
/// a round trip before it is written.
template <class R, class Codec>
class Collection {
public:
    explicit Collection(std::filesystem::path path, bool durable = false) : log_(std::move(path), durable)
    {
        const auto lines = log_.snapshot();
        std::size_t n = 0;
        for (const auto& line : *lines) {
            ++n;
            try {
                records_.push_back(Codec::parse(line));
            } catch (const Error& e) {
                throw ParseError(log_.path().string() + " line " + std::to_string(n) + ": " + e.what());
            }
        }
    }

    static std::string encode(const R& record)
    {
        auto line = Codec::format(record);
        if (!(Codec::parse(line) == record)) {
            throw InvalidRequest("record does not survive serialization: '" + line + "'");
        }
        return line;
    }

    void append(const R& record) { append_all({record}); }

    void append_all(const std::vector<R>& records)
    {
        if (records.empty()) {
            return;
        }
        LineLog::Lines lines;
        for (const auto& r : records) {
            lines.push_back(encode(r));
        }
        log_.append(lines);
        records_.insert(records_.end(), records.begin(), records.end());
    }

    /// Records as of the last append (single-writer view).
    const std::vector<R>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    LineLog& log() { return log_; }
    const LineLog& log() const { return log_; }

private:
    LineLog log_;
    std::vector<R> records_;
};

}  // namespace quickstep
