/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace cityforge {

class TaskPool;

/// Serial lane on a TaskPool: tasks posted to one strand run one at a time, in post order.
class Strand : public std::enable_shared_from_this<Strand> {
  public:
    void post(std::function<void()> task);

  private:
    friend class TaskPool;
    explicit Strand(TaskPool& pool) : pool_(pool) {}
    bool runOne();

    TaskPool& pool_;
    std::mutex mutex_;
    std::deque<std::function<void()>> tasks_;
    bool scheduled_ = false;
};

/// Fixed set of worker threads draining strands. Destruction drains outstanding work.
class TaskPool {
  public:
    explicit TaskPool(std::size_t workers);
    ~TaskPool();
    TaskPool(const TaskPool&) = delete;
    TaskPool& operator=(const TaskPool&) = delete;

    std::shared_ptr<Strand> makeStrand();

    /// Blocks until every posted task has finished.
    void waitIdle();

  private:
    friend class Strand;
    void schedule(std::shared_ptr<Strand> strand);
    void taskPosted();
    void taskFinished();
    void workerLoop();

    std::mutex mutex_;
    std::condition_variable ready_;
    std::condition_variable idle_;
    std::deque<std::shared_ptr<Strand>> queue_;
    std::size_t outstanding_ = 0;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

}// namespace cityforge
