#include "lseg/channel.hpp"

#include "lseg/error.hpp"
#include "lseg/wire.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

namespace lseg {

std::optional<Bytes> FrameReader::next() {
    if (buf_.size() < kFrameHeaderSize)
        return std::nullopt;
    size_t total = kFrameHeaderSize + ((size_t(buf_[1]) << 8) | buf_[2]);
    if (buf_.size() < total)
        return std::nullopt;
    Bytes frame(buf_.begin(), buf_.begin() + total);
    buf_.erase(buf_.begin(), buf_.begin() + total);
    return frame;
}

void ByteQueue::push(ByteView bytes) {
    {
        std::lock_guard lock(mutex_);
        if (closed_)
            fail(Error::ChannelClosed);
        append(data_, bytes);
    }
    cv_.notify_all();
}

Bytes ByteQueue::pop_some(std::optional<std::chrono::milliseconds> timeout) {
    std::unique_lock lock(mutex_);
    auto ready = [&] { return !data_.empty() || closed_; };
    if (timeout) {
        if (!cv_.wait_for(lock, *timeout, ready))
            fail(Error::Timeout);
    } else {
        cv_.wait(lock, ready);
    }
    Bytes out;
    out.swap(data_);
    return out;
}

void ByteQueue::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

std::pair<std::unique_ptr<MemoryChannel>, std::unique_ptr<MemoryChannel>> MemoryChannel::pair() {
    auto a = std::make_shared<ByteQueue>();
    auto b = std::make_shared<ByteQueue>();
    return {std::unique_ptr<MemoryChannel>(new MemoryChannel(a, b)),
            std::unique_ptr<MemoryChannel>(new MemoryChannel(b, a))};
}

void MemoryChannel::send(ByteView frame) { out_->push(frame); }

std::optional<Bytes> MemoryChannel::receive() {
    for (;;) {
        if (auto f = reader_.next())
            return f;
        Bytes chunk = in_->pop_some(timeout_);
        if (chunk.empty())
            return std::nullopt;
        reader_.feed(chunk);
    }
}

void MemoryChannel::close() {
    out_->close();
    in_->close();
}

// ---------------------------------------------------------------------------

std::pair<std::string, uint16_t> split_endpoint(const std::string& endpoint) {
    auto colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon + 1 == endpoint.size())
        throw std::invalid_argument("expected host:port, got '" + endpoint + "'");
    std::string host = endpoint.substr(0, colon);
    const std::string digits = endpoint.substr(colon + 1);
    if (digits.size() > 5 || digits.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad port in '" + endpoint + "'");
    unsigned long port = std::stoul(digits);
    if (port > 65535)
        throw std::invalid_argument("port out of range");
    if (host.empty())
        host = "0.0.0.0";
    return {host, uint16_t(port)};
}

namespace {

[[noreturn]] void io_fail(const std::string& what) {
    fail(Error::IoError, what + ": " + std::strerror(errno));
}

addrinfo* resolve(const std::string& host, uint16_t port, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = passive ? AI_PASSIVE : 0;
    addrinfo* res = nullptr;
    int rc = getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
    if (rc != 0)
        fail(Error::IoError, "resolve " + host + ": " + gai_strerror(rc));
    return res;
}

} // namespace

TcpChannel::TcpChannel(int fd) : fd_(fd) {
    int one = 1;
    setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpChannel::~TcpChannel() { close(); }

std::unique_ptr<TcpChannel> TcpChannel::connect(const std::string& endpoint) {
    auto [host, port] = split_endpoint(endpoint);
    addrinfo* res = resolve(host, port, false);
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0)
            continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0)
            break;
        ::close(fd);
        fd = -1;
    }
    freeaddrinfo(res);
    if (fd < 0)
        io_fail("connect " + endpoint);
    return std::make_unique<TcpChannel>(fd);
}

void TcpChannel::send(ByteView frame) {
    if (fd_ < 0)
        fail(Error::ChannelClosed);
    size_t off = 0;
    while (off < frame.size()) {
        ssize_t n = ::send(fd_, frame.data() + off, frame.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            if (errno == EPIPE || errno == ECONNRESET)
                fail(Error::ChannelClosed);
            io_fail("send");
        }
        off += size_t(n);
    }
}

std::optional<Bytes> TcpChannel::receive() {
    uint8_t buf[4096];
    for (;;) {
        if (auto f = reader_.next())
            return f;
        if (fd_ < 0)
            return std::nullopt;
        ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
        if (n == 0)
            return std::nullopt;
        if (n < 0) {
            if (errno == EINTR)
                continue;
            if (errno == EAGAIN || errno == EWOULDBLOCK)
                fail(Error::Timeout);
            if (errno == ECONNRESET)
                return std::nullopt;
            io_fail("recv");
        }
        reader_.feed(ByteView(buf, size_t(n)));
    }
}

void TcpChannel::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

void TcpChannel::set_timeout(std::chrono::milliseconds t) {
    timeval tv{};
    tv.tv_sec = t.count() / 1000;
    tv.tv_usec = (t.count() % 1000) * 1000;
    setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

TcpListener::TcpListener(const std::string& endpoint) : fd_(-1) {
    auto [host, port] = split_endpoint(endpoint);
    addrinfo* res = resolve(host, port, true);
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd_ < 0)
            continue;
        int one = 1;
        setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd_, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd_, 64) == 0)
            break;
        ::close(fd_);
        fd_ = -1;
    }
    freeaddrinfo(res);
    if (fd_ < 0)
        io_fail("listen " + endpoint);

    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    if (addr.ss_family == AF_INET)
        port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    else
        port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
}

TcpListener::~TcpListener() { close(); }

std::unique_ptr<TcpChannel> TcpListener::accept() {
    for (;;) {
        int fd = ::accept(fd_, nullptr, nullptr);
        if (fd >= 0)
            return std::make_unique<TcpChannel>(fd);
        if (errno == EINTR)
            continue;
        io_fail("accept");
    }
}

void TcpListener::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

} // namespace lseg
