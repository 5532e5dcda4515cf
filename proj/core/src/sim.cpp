namespace coex {}
