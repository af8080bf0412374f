// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace smashlab {

/*!
 * Persistent threads that split a range into fixed contiguous chunks.
 *
 * Chunk boundaries depend only on the range and the thread count, so
 * per-chunk results can be combined deterministically by the caller.
 */
class WorkerPool
{
  public:
    using Task = std::function<void(unsigned chunk, long begin, long end)>;

    explicit WorkerPool(unsigned threads) : size_(threads ? threads : 1)
    {
        for (unsigned c = 1; c < size_; ++c)
            workers_.emplace_back([this, c] { loop(c); });
    }

    ~WorkerPool()
    {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
            ++generation_;
        }
        wake_.notify_all();
        for (auto& t : workers_)
            t.join();
    }

    WorkerPool(WorkerPool const&) = delete;
    WorkerPool& operator=(WorkerPool const&) = delete;

    unsigned size() const { return size_; }

    //! Run task over [0, count) and wait for all chunks.
    void run(long count, Task const& task)
    {
        if (size_ == 1 || count < static_cast<long>(size_))
        {
            task(0, 0, count);
            return;
        }
        {
            std::lock_guard lock(mutex_);
            task_ = &task;
            count_ = count;
            pending_ = size_ - 1;
            ++generation_;
        }
        wake_.notify_all();
        auto [b, e] = bounds(0);
        task(0, b, e);
        std::unique_lock lock(mutex_);
        done_.wait(lock, [this] { return pending_ == 0; });
        task_ = nullptr;
    }

  private:
    std::pair<long, long> bounds(unsigned c) const
    {
        long const per = count_ / size_;
        long const extra = count_ % size_;
        long const b = c * per + std::min<long>(c, extra);
        return {b, b + per + (c < extra ? 1 : 0)};
    }

    void loop(unsigned c)
    {
        unsigned long seen = 0;
        for (;;)
        {
            Task const* task = nullptr;
            {
                std::unique_lock lock(mutex_);
                wake_.wait(lock, [&] { return generation_ != seen; });
                seen = generation_;
                if (stop_)
                    return;
                task = task_;
            }
            auto [b, e] = bounds(c);
            (*task)(c, b, e);
            {
                std::lock_guard lock(mutex_);
                --pending_;
            }
            done_.notify_one();
        }
    }

    unsigned size_;
    std::vector<std::thread> workers_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    Task const* task_ = nullptr;
    long count_ = 0;
    unsigned pending_ = 0;
    unsigned long generation_ = 0;
    bool stop_ = false;
};

}  // namespace smashlab
