// SPDX-License-Identifier: Apache-2.0
#include "audioinsight/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "audioinsight/common.hpp"
#include "audioinsight/dsp.hpp"

namespace audioinsight {

namespace {

uint32_t read_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& s, uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& s, uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioClip read_audio(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open audio file: " + path);
    std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
        std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
        throw Error("not a RIFF/WAVE file: " + path);

    int channels = 0, bits = 0, rate = 0;
    size_t data_off = 0, data_len = 0;
    size_t pos = 12;
    while (pos + 8 <= raw.size()) {
        const char* id = reinterpret_cast<const char*>(raw.data() + pos);
        uint32_t sz = read_u32(raw.data() + pos + 4);
        size_t body = pos + 8;
        if (std::memcmp(id, "fmt ", 4) == 0 && body + 16 <= raw.size()) {
            uint16_t fmt = read_u16(raw.data() + body);
            channels = read_u16(raw.data() + body + 2);
            rate = static_cast<int>(read_u32(raw.data() + body + 4));
            bits = read_u16(raw.data() + body + 14);
            if (fmt != 1) throw Error("unsupported codec (only PCM): " + path);
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_off = body;
            data_len = std::min<size_t>(sz, raw.size() - body);
        }
        pos = body + sz + (sz & 1);
    }
    if (channels <= 0 || rate <= 0 || (bits != 8 && bits != 16 && bits != 24))
        throw Error("unsupported WAV format in " + path);
    if (data_len == 0) throw Error("zero-length audio: " + path);

    const int bytes_per = bits / 8;
    const size_t n_frames = data_len / (static_cast<size_t>(bytes_per) * channels);
    if (n_frames == 0) throw Error("zero-length audio: " + path);

    std::vector<float> mono(n_frames, 0.0f);
    const uint8_t* d = raw.data() + data_off;
    for (size_t f = 0; f < n_frames; ++f) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
            const uint8_t* s = d + (f * channels + c) * bytes_per;
            double v = 0.0;
            if (bits == 8) {
                v = (static_cast<int>(s[0]) - 128) / 128.0;
            } else if (bits == 16) {
                int16_t q = static_cast<int16_t>(s[0] | (s[1] << 8));
                v = q / 32768.0;
            } else {
                int32_t q = static_cast<int32_t>(s[0] | (s[1] << 8) | (s[2] << 16));
                if (q & 0x800000) q |= ~0xffffff;  // sign-extend
                v = q / 8388608.0;
            }
            acc += v;
        }
        mono[f] = static_cast<float>(acc / channels);
    }

    AudioClip clip;
    clip.clip_id = std::filesystem::path(path).stem().string();
    clip.sample_rate = kCanonicalRate;
    clip.samples = (rate == kCanonicalRate) ? std::move(mono)
                                            : resample(mono, rate, kCanonicalRate);
    if (clip.samples.empty()) throw Error("zero-length audio after resample: " + path);
    for (auto& v : clip.samples) v = std::clamp(v, -1.0f, 1.0f);
    return clip;
}

void write_wav16(const std::string& path, const std::vector<float>& samples, int sample_rate) {
    std::string out;
    out.reserve(44 + samples.size() * 2);
    const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, static_cast<uint32_t>(sample_rate));
    put_u32(out, static_cast<uint32_t>(sample_rate * 2));
    put_u16(out, 2);
    put_u16(out, 16);
    out += "data";
    put_u32(out, data_bytes);
    for (float v : samples) {
        long q = std::lround(static_cast<double>(std::clamp(v, -1.0f, 1.0f)) * 32768.0);
        int16_t s = static_cast<int16_t>(std::clamp<long>(q, -32768, 32767));
        out.push_back(static_cast<char>(s & 0xff));
        out.push_back(static_cast<char>((s >> 8) & 0xff));
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write wav: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error("short write: " + path);
}

}  // namespace audioinsight
