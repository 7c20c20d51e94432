import { ApiClient } from './api';
import { App } from './app';
import './style.css';

const baseUrl =
  (import.meta.env && import.meta.env.VITE_API_URL) ||
  (window as unknown as { TOPICLINK_API?: string }).TOPICLINK_API ||
  '';

const root = document.getElementById('app');
if (root) {
  const app = new App(root, new ApiClient(baseUrl), location.search);
  void app.start();
}
