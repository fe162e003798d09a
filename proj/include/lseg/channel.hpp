#pragma once

// Reliable ordered frame transports. Both implementations carry a byte
// stream and cut it into frames using the 3-byte wire header.

#include "lseg/bytes.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

namespace lseg {

class Channel {
public:
    virtual ~Channel() = default;

    virtual void send(ByteView frame) = 0;

    /// Next complete frame, or nullopt once the peer has closed.
    virtual std::optional<Bytes> receive() = 0;

    virtual void close() = 0;
};

/// Incremental frame reassembly from arbitrary stream chunks.
class FrameReader {
public:
    void feed(ByteView chunk) { append(buf_, chunk); }
    std::optional<Bytes> next();
    bool idle() const { return buf_.empty(); }

private:
    Bytes buf_;
};

/// One direction of an in-memory stream.
class ByteQueue {
public:
    void push(ByteView bytes);
    /// Blocks until data or close; an empty result means closed.
    Bytes pop_some(std::optional<std::chrono::milliseconds> timeout);
    void close();

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    Bytes data_;
    bool closed_ = false;
};

class MemoryChannel final : public Channel {
public:
    /// Connected pair; bytes written on one end are read on the other.
    static std::pair<std::unique_ptr<MemoryChannel>, std::unique_ptr<MemoryChannel>> pair();

    void send(ByteView frame) override;
    std::optional<Bytes> receive() override;
    void close() override;

    /// Error::Timeout when receive() waits longer than this.
    void set_timeout(std::chrono::milliseconds t) { timeout_ = t; }

private:
    MemoryChannel(std::shared_ptr<ByteQueue> in, std::shared_ptr<ByteQueue> out)
        : in_(std::move(in)), out_(std::move(out)) {}

    std::shared_ptr<ByteQueue> in_;
    std::shared_ptr<ByteQueue> out_;
    FrameReader reader_;
    std::optional<std::chrono::milliseconds> timeout_;
};

class TcpChannel final : public Channel {
public:
    /// Takes ownership of a connected socket.
    explicit TcpChannel(int fd);
    ~TcpChannel() override;
    TcpChannel(const TcpChannel&) = delete;
    TcpChannel& operator=(const TcpChannel&) = delete;

    /// "host:port"; throws Error::IoError.
    static std::unique_ptr<TcpChannel> connect(const std::string& endpoint);

    void send(ByteView frame) override;
    std::optional<Bytes> receive() override;
    void close() override;

    /// Error::Timeout when a receive waits longer than this.
    void set_timeout(std::chrono::milliseconds t);

private:
    int fd_;
    FrameReader reader_;
};

class TcpListener {
public:
    /// "host:port"; port 0 picks an ephemeral port.
    explicit TcpListener(const std::string& endpoint);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    uint16_t port() const { return port_; }
    std::unique_ptr<TcpChannel> accept();
    void close();

private:
    int fd_;
    uint16_t port_ = 0;
};

/// Splits "host:port"; throws std::invalid_argument.
std::pair<std::string, uint16_t> split_endpoint(const std::string& endpoint);

} // namespace lseg
