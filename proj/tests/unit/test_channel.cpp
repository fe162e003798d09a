#include "lseg/channel.hpp"
#include "lseg/wire.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <thread>

using namespace lseg;

TEST_CASE("frame reader reassembles arbitrary chunks") {
    Bytes a = encode(Hello{PartyId{1}});
    Bytes b = encode(AppFrame{5, Bytes(300, 7)});
    Bytes stream = a;
    append(stream, b);
    append(stream, a);

    for (size_t chunk : {1, 2, 3, 7, 64, 1000}) {
        FrameReader r;
        std::vector<Bytes> out;
        for (size_t i = 0; i < stream.size(); i += chunk) {
            r.feed(ByteView(stream).subspan(i, std::min(chunk, stream.size() - i)));
            while (auto f = r.next())
                out.push_back(*f);
        }
        REQUIRE(out.size() == 3);
        CHECK(out[0] == a);
        CHECK(out[1] == b);
        CHECK(out[2] == a);
        CHECK(r.idle());
    }
}

TEST_CASE("memory channel") {
    auto [a, b] = MemoryChannel::pair();
    a->send(Bytes{0x01, 0x00, 0x01, 0xff});
    CHECK(b->receive() == Bytes{0x01, 0x00, 0x01, 0xff});

    b->set_timeout(std::chrono::milliseconds(20));
    CHECK(error_of([&] { b->receive(); }) == Error::Timeout);

    std::thread t([&] { a->send(encode(Hello{})); });
    t.join();
    CHECK(b->receive() == encode(Hello{}));

    a->close();
    CHECK_FALSE(b->receive());
}

TEST_CASE("tcp loopback") {
    TcpListener listener("127.0.0.1:0");
    REQUIRE(listener.port() != 0);
    Bytes big = encode(AppFrame{1, Bytes(60000, 3)});

    std::thread server([&] {
        auto ch = listener.accept();
        while (auto f = ch->receive())
            ch->send(*f);
    });
    auto ch = TcpChannel::connect("127.0.0.1:" + std::to_string(listener.port()));
    ch->set_timeout(std::chrono::seconds(10));
    ch->send(encode(Hello{PartyId{9}}));
    ch->send(big);
    CHECK(ch->receive() == encode(Hello{PartyId{9}}));
    CHECK(ch->receive() == big);
    ch->close();
    server.join();
}

TEST_CASE("tcp errors") {
    CHECK(error_of([] { TcpChannel::connect("127.0.0.1:1"); }) == Error::IoError);
    CHECK_THROWS_AS(split_endpoint("no-port"), std::invalid_argument);
    CHECK_THROWS_AS(split_endpoint("host:99999"), std::invalid_argument);
    CHECK_THROWS_AS(split_endpoint("host:80x"), std::invalid_argument);
    CHECK(split_endpoint("localhost:8080") == std::pair<std::string, uint16_t>{"localhost", 8080});

    TcpListener listener("127.0.0.1:0");
    std::thread server([&] { auto ch = listener.accept(); std::this_thread::sleep_for(std::chrono::milliseconds(300)); });
    auto ch = TcpChannel::connect("127.0.0.1:" + std::to_string(listener.port()));
    ch->set_timeout(std::chrono::milliseconds(50));
    CHECK(error_of([&] { ch->receive(); }) == Error::Timeout);
    server.join();
}
