# テストディレクトリをPythonパッケージとして認識させるためのファイル
