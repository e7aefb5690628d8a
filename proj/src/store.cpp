#include "quickstep/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace quickstep {

namespace {

std::string errno_text(const std::string& what, const std::filesystem::path& path)
{
    return what + " " + path.string() + ": " + std::strerror(errno);
}

class Fd {
public:
    Fd(const std::filesystem::path& path, int flags) : fd_(::open(path.c_str(), flags | O_CLOEXEC, 0644))
    {
        if (fd_ < 0) {
            throw StorageError(errno_text("cannot open", path));
        }
    }
    ~Fd()
    {
        if (fd_ >= 0) {
            ::close(fd_);
        }
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    int get() const { return fd_; }

private:
    int fd_;
};

void write_all(int fd, std::string_view data, const std::filesystem::path& path)
{
    while (!data.empty()) {
        const auto n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw StorageError(errno_text("write failed on", path));
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

void sync(int fd, const std::filesystem::path& path)
{
    if (::fsync(fd) != 0) {
        throw StorageError(errno_text("fsync failed on", path));
    }
}

void sync_directory(const std::filesystem::path& dir)
{
    Fd d(dir.empty() ? std::filesystem::path(".") : dir, O_RDONLY | O_DIRECTORY);
    sync(d.get(), dir);
}

// Writes `data`, or only a prefix of it when a crash is injected.
void write_or_crash(int fd, std::string_view data, const std::filesystem::path& path,
    std::optional<std::size_t> crash_after)
{
    if (crash_after && *crash_after < data.size()) {
        write_all(fd, data.substr(0, *crash_after), path);
        throw SimulatedCrash("simulated crash after " + std::to_string(*crash_after) + " bytes");
    }
    write_all(fd, data, path);
}

}  // namespace

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StorageError("cannot read " + path.string());
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content, const WriteOptions& options)
{
    auto tmp = path;
    tmp += ".new";
    {
        Fd fd(tmp, O_WRONLY | O_CREAT | O_TRUNC);
        write_or_crash(fd.get(), content, tmp, options.crash_after_bytes);
        if (options.crash_after_bytes && *options.crash_after_bytes == content.size()) {
            throw SimulatedCrash("simulated crash before rename");
        }
        if (options.durable) {
            sync(fd.get(), tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw StorageError("cannot rename " + tmp.string() + ": " + ec.message());
    }
    if (options.durable) {
        sync_directory(path.parent_path());
    }
}

LineLog::LineLog(std::filesystem::path path, bool durable)
    : path_(std::move(path)), durable_(durable), lines_(std::make_shared<Lines>())
{
    if (!std::filesystem::exists(path_)) {
        Fd create(path_, O_WRONLY | O_CREAT | O_APPEND);
        if (durable_) {
            sync_directory(path_.parent_path());
        }
        return;
    }
    const auto content = read_file(path_);
    const auto end = content.rfind('\n');
    const std::size_t keep = end == std::string::npos ? 0 : end + 1;
    if (keep < content.size()) {
        recovered_bytes_ = content.size() - keep;
        std::filesystem::resize_file(path_, keep);
    }
    std::size_t start = 0;
    while (start < keep) {
        const auto nl = content.find('\n', start);
        lines_->emplace_back(content, start, nl - start);
        start = nl + 1;
    }
}

void LineLog::append(const Lines& lines)
{
    std::string payload;
    for (const auto& line : lines) {
        if (line.find('\n') != std::string::npos || line.find('\r') != std::string::npos) {
            throw InvalidRequest("record contains a line break");
        }
        payload += line;
        payload += '\n';
    }
    std::lock_guard lock(mutex_);
    if (broken_) {
        throw StorageError(path_.string() + " is unusable after a failed append; reopen it");
    }
    try {
        Fd fd(path_, O_WRONLY | O_APPEND);
        write_or_crash(fd.get(), payload, path_, crash_after_);
        if (durable_) {
            sync(fd.get(), path_);
        }
    } catch (...) {
        broken_ = true;
        throw;
    }
    // Copy only when a reader still holds the current view.
    if (lines_.use_count() > 1) {
        lines_ = std::make_shared<Lines>(*lines_);
    }
    lines_->insert(lines_->end(), lines.begin(), lines.end());
}

std::shared_ptr<const LineLog::Lines> LineLog::snapshot() const
{
    std::lock_guard lock(mutex_);
    return lines_;
}

std::size_t LineLog::size() const
{
    std::lock_guard lock(mutex_);
    return lines_->size();
}

void LineLog::crash_after(std::optional<std::size_t> bytes)
{
    std::lock_guard lock(mutex_);
    crash_after_ = bytes;
}

}  // namespace quickstep
