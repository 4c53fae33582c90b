// Copyright 2026 The kconflict Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef KCONFLICT_LINE_IO_HPP_
#define KCONFLICT_LINE_IO_HPP_

// Line-oriented streaming over plain or gzip-compressed byte streams. Memory
// use is bounded by one I/O buffer plus the longest line.

#include <zlib.h>

#include <array>
#include <cstring>
#include <cstddef>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>

#include "kconflict/error.hpp"

namespace kconflict {

inline bool HasGzipSuffix(std::string_view path) {
  return path.size() >= 3 && path.substr(path.size() - 3) == ".gz";
}

class LineReader {
 public:
  LineReader(std::istream& in, bool gzipped, std::string name = "<stream>")
      : in_(&in), gzipped_(gzipped), name_(std::move(name)) {
    if (gzipped_) InitInflate();
  }

  // Opens `path`; gzip is detected from the magic bytes, not the suffix.
  explicit LineReader(const std::string& path)
      : owned_(std::make_unique<std::ifstream>(path, std::ios::binary)),
        in_(owned_.get()),
        name_(path) {
    if (!*owned_) throw Error(ErrorCode::kIo, "cannot open " + path);
    const int b0 = owned_->get();
    const int b1 = owned_->get();
    gzipped_ = b0 == 0x1f && b1 == 0x8b;
    owned_->clear();
    owned_->seekg(0);
    if (gzipped_) InitInflate();
  }

  ~LineReader() {
    if (inflate_ready_) inflateEnd(&zs_);
  }

  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  // Reads the next line without its terminator ("\n" or "\r\n").
  bool Next(std::string& line) {
    line.clear();
    for (;;) {
      if (pos_ < out_len_) {
        const char* begin = out_.data() + pos_;
        const char* end = out_.data() + out_len_;
        const char* nl = static_cast<const char*>(
            std::memchr(begin, '\n', static_cast<std::size_t>(end - begin)));
        if (nl != nullptr) {
          line.append(begin, nl);
          pos_ += static_cast<std::size_t>(nl - begin) + 1;
          break;
        }
        line.append(begin, end);
        pos_ = out_len_;
      }
      if (!Fill()) {
        if (line.empty()) return false;
        break;
      }
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_number_;
    return true;
  }

  // 1-based number of the line last returned by Next().
  std::size_t line_number() const { return line_number_; }
  const std::string& name() const { return name_; }

 private:
  static constexpr std::size_t kBufferSize = 1 << 16;

  void InitInflate() {
    zs_ = {};
    if (inflateInit2(&zs_, 15 + 32) != Z_OK) {
      throw Error(ErrorCode::kIo, "inflateInit failed for " + name_);
    }
    inflate_ready_ = true;
    in_buf_ = std::make_unique<std::array<char, kBufferSize>>();
  }

  bool ReadRaw(char* dst, std::size_t cap, std::size_t& got) {
    in_->read(dst, static_cast<std::streamsize>(cap));
    got = static_cast<std::size_t>(in_->gcount());
    if (in_->bad()) throw Error(ErrorCode::kIo, "read failed on " + name_);
    return got > 0;
  }

  // Refills out_ with the next chunk of decoded bytes.
  bool Fill() {
    pos_ = 0;
    out_len_ = 0;
    if (!gzipped_) {
      std::size_t got = 0;
      ReadRaw(out_.data(), out_.size(), got);
      out_len_ = got;
      return got > 0;
    }
    while (out_len_ == 0) {
      if (zs_.avail_in == 0) {
        std::size_t got = 0;
        if (!ReadRaw(in_buf_->data(), in_buf_->size(), got)) {
          if (!stream_ended_) {
            throw Error(ErrorCode::kParse, "truncated gzip stream in " + name_);
          }
          return false;
        }
        zs_.next_in = reinterpret_cast<Bytef*>(in_buf_->data());
        zs_.avail_in = static_cast<uInt>(got);
      }
      if (stream_ended_) {
        // Concatenated gzip member.
        inflateReset(&zs_);
        stream_ended_ = false;
      }
      zs_.next_out = reinterpret_cast<Bytef*>(out_.data());
      zs_.avail_out = static_cast<uInt>(out_.size());
      const int rc = inflate(&zs_, Z_NO_FLUSH);
      if (rc == Z_STREAM_END) {
        stream_ended_ = true;
      } else if (rc != Z_OK && rc != Z_BUF_ERROR) {
        throw Error(ErrorCode::kParse, "corrupt gzip data in " + name_);
      }
      out_len_ = out_.size() - zs_.avail_out;
    }
    return true;
  }

  std::unique_ptr<std::ifstream> owned_;
  std::istream* in_;
  bool gzipped_ = false;
  std::string name_;
  std::array<char, kBufferSize> out_{};
  std::size_t pos_ = 0;
  std::size_t out_len_ = 0;
  std::size_t line_number_ = 0;
  z_stream zs_{};
  bool inflate_ready_ = false;
  bool stream_ended_ = false;
  std::unique_ptr<std::array<char, kBufferSize>> in_buf_;
};

// Writes newline-terminated lines, optionally gzip-compressed. The gzip
// header carries no timestamp or file name, so output bytes depend only on
// the lines written.
class LineWriter {
 public:
  LineWriter(std::ostream& out, bool gzipped, std::string name = "<stream>")
      : out_(&out), gzipped_(gzipped), name_(std::move(name)) {
    if (gzipped_) InitDeflate();
  }

  // Opens `path` for writing; gzip iff the path ends in ".gz".
  explicit LineWriter(const std::string& path)
      : owned_(std::make_unique<std::ofstream>(
            path, std::ios::binary | std::ios::trunc)),
        out_(owned_.get()),
        gzipped_(HasGzipSuffix(path)),
        name_(path) {
    if (!*owned_) throw Error(ErrorCode::kIo, "cannot open " + path);
    if (gzipped_) InitDeflate();
  }

  ~LineWriter() {
    if (!closed_) {
      try {
        Close();
      } catch (...) {
      }
    }
  }

  LineWriter(const LineWriter&) = delete;
  LineWriter& operator=(const LineWriter&) = delete;

  void Write(std::string_view line) {
    Emit(line.data(), line.size());
    Emit("\n", 1);
  }

  // Flushes all pending bytes; reports I/O failures that the destructor
  // would otherwise swallow.
  void Close() {
    if (closed_) return;
    closed_ = true;
    if (gzipped_) {
      Deflate(nullptr, 0, Z_FINISH);
      deflateEnd(&zs_);
    }
    out_->flush();
    if (owned_) owned_->close();
    if (out_->fail() || (owned_ && owned_->fail())) {
      throw Error(ErrorCode::kIo, "write failed on " + name_);
    }
  }

 private:
  void InitDeflate() {
    zs_ = {};
    if (deflateInit2(&zs_, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK) {
      throw Error(ErrorCode::kIo, "deflateInit failed for " + name_);
    }
  }

  void Emit(const char* data, std::size_t size) {
    if (!gzipped_) {
      out_->write(data, static_cast<std::streamsize>(size));
    } else {
      Deflate(data, size, Z_NO_FLUSH);
    }
    if (out_->fail()) throw Error(ErrorCode::kIo, "write failed on " + name_);
  }

  void Deflate(const char* data, std::size_t size, int flush) {
    zs_.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data));
    zs_.avail_in = static_cast<uInt>(size);
    std::array<char, 1 << 16> buf;
    int rc = Z_OK;
    do {
      zs_.next_out = reinterpret_cast<Bytef*>(buf.data());
      zs_.avail_out = static_cast<uInt>(buf.size());
      rc = deflate(&zs_, flush);
      if (rc == Z_STREAM_ERROR) {
        throw Error(ErrorCode::kIo, "deflate failed for " + name_);
      }
      out_->write(buf.data(),
                  static_cast<std::streamsize>(buf.size() - zs_.avail_out));
    } while (zs_.avail_out == 0 || (flush == Z_FINISH && rc != Z_STREAM_END));
  }

  std::unique_ptr<std::ofstream> owned_;
  std::ostream* out_;
  bool gzipped_ = false;
  std::string name_;
  z_stream zs_{};
  bool closed_ = false;
};

}  // namespace kconflict

#endif  // KCONFLICT_LINE_IO_HPP_
